#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// phi(x^n): per-row mean square of a codeword.
PowerType power_type(const BlockMatrix& x);

/// True iff |t_l - s_l| <= delta for every channel.
bool in_bounding_box(const PowerType& t, const PowerAllocation& s, double delta);

/// Number of weak compositions of n into `parts` parts, binomial(n+parts-1, parts-1).
/// Throws std::overflow_error when it does not fit in 64 bits.
std::uint64_t composition_count(std::uint64_t n, std::size_t parts);

/// Natural log of composition_count(), valid for any size.
double log_composition_count(double n, std::size_t parts);

/// Walks the weak compositions of n into `parts` parts in lexicographic order,
/// starting at (0, ..., 0, n).
class CompositionIterator {
 public:
  CompositionIterator(std::uint32_t n, std::size_t parts);

  std::span<const std::uint32_t> current() const { return counts_; }
  /// Advances; returns false after the last composition (n, 0, ..., 0).
  bool next();

 private:
  std::vector<std::uint32_t> counts_;
};

/// Calls `visit` with every element (P/n) a of the quantized allocation
/// lattice, without materializing the set.
void for_each_power_type(std::uint32_t n, const ChannelSpec& spec,
                         const std::function<void(const PowerAllocation&)>& visit);

/// The lattice of quantized allocations {(P/n) a : a in Z_+^L, sum a = n},
/// or a filtered subset of it.
class PowerTypeSet {
 public:
  static constexpr std::uint64_t kDefaultMaxEntries = 20'000'000;

  static PowerTypeSet enumerate(std::uint32_t n, const ChannelSpec& spec,
                                std::uint64_t max_entries = kDefaultMaxEntries);

  std::uint32_t block_length() const { return n_; }
  std::size_t channels() const { return channels_; }
  double power() const { return power_; }
  std::size_t size() const { return channels_ == 0 ? 0 : counts_.size() / channels_; }
  bool empty() const { return size() == 0; }

  std::span<const std::uint32_t> counts(std::size_t i) const {
    return {counts_.data() + i * channels_, channels_};
  }
  PowerAllocation allocation(std::size_t i) const;

  /// Entries satisfying `keep`, in the original order.
  PowerTypeSet filter(const std::function<bool(const PowerAllocation&)>& keep) const;
  PowerTypeSet filter_counts(const std::function<bool(std::span<const std::uint32_t>)>& keep) const;

 private:
  PowerTypeSet(std::uint32_t n, std::size_t channels, double power)
      : n_(n), channels_(channels), power_(power) {}

  std::uint32_t n_ = 0;
  std::size_t channels_ = 0;
  double power_ = 0.0;
  std::vector<std::uint32_t> counts_;
};

/// Default radius exponent: near-optimal types lie within n^(-1/6) of P*.
inline constexpr double kNearRadiusExponent = 1.0 / 6.0;

/// Pi^(n) = {s in S^(n) : ||s - P*|| <= n^(-exponent)}.
PowerTypeSet near_optimal_subset(const PowerTypeSet& set, const PowerAllocation& pstar,
                                 double exponent = kNearRadiusExponent);

/// S^(n) \ Pi^(n).
PowerTypeSet far_subset(const PowerTypeSet& set, const PowerAllocation& pstar,
                        double exponent = kNearRadiusExponent);

/// |Pi^(n)| counted without enumerating S^(n): the last two coordinates of a
/// composition are resolved as an interval, so the cost is O(n^(L-2)).
std::uint64_t count_near_optimal(std::uint32_t n, const ChannelSpec& spec, const PowerAllocation& pstar,
                                 double exponent = kNearRadiusExponent);

/// Lattice coordinates a = t n / P when every one of them is within
/// `tolerance` of an integer and they sum to n; nullopt otherwise.
std::optional<std::vector<std::uint32_t>> lattice_counts(const PowerType& t, std::uint32_t n, double power,
                                                         double tolerance = 1e-9);

}  // namespace fblock
