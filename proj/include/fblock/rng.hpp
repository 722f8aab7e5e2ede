#pragma once

#include <cstdint>

namespace fblock {

/// Key of a reproducible random stream. Monte Carlo trials use one stream
/// per trial index, so results do not depend on how trials are scheduled.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Key of the `index`-th sub-stream below this one.
  RngSeed substream(std::uint64_t index) const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// xoshiro256** seeded through SplitMix64.
///
/// Normal deviates come from the Marsaglia polar method, which needs only
/// sqrt() and log(); sample paths therefore match across builds that share an
/// IEEE-754 log(). The generator never uses std::normal_distribution, whose
/// algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(RngSeed key);

  std::uint64_t next();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal deviate.
  double normal();

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fblock
