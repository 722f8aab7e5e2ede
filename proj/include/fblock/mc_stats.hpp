#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/encoder.hpp"
#include "fblock/rng.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// Per-trial record of one closed-loop simulation batch.
struct SpectrumRun {
  std::size_t n = 0;
  std::size_t channels = 0;
  std::size_t trials = 0;
  RngSeed seed;
  PowerAllocation d;  ///< allocation inside U^(d)
  std::vector<double> sums_u;
  std::vector<double> sums_v;
  /// trials x channels, row-major: codeword energy sum_k x_{l,k}^2 per channel.
  std::vector<double> energies;
  std::vector<std::uint64_t> messages;

  std::span<const double> energy(std::size_t trial) const { return {energies.data() + trial * channels, channels}; }
  PowerType power_type(std::size_t trial) const;
};

/// Simulates `trials` independent blocks through the feedback loop.
///
/// Trial t draws from Rng(seed.substream(t)): first the message (uniform),
/// then the noise column by column. U^(d) and V^(P*) are accumulated along
/// the way. Results are identical for every thread count.
SpectrumRun simulate_spectrum(const FeedbackEncoder& prototype, const ChannelSpec& spec, const PowerAllocation& d,
                              const PowerAllocation& pstar, std::size_t trials, RngSeed seed, unsigned threads = 1);

struct MgfEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  double log_mean = 0.0;
  /// std_error / mean: the delta-method standard error of log_mean.
  double log_std_error = 0.0;
};

/// Sample mean of exp(x_i) and its standard error, computed around the
/// largest exponent with compensated summation in index order, so huge or
/// tiny exponents neither overflow nor lose the small terms.
MgfEstimate estimate_exp_mean(std::span<const double> log_values);

/// Trial-wise exponent of the power-corrected statistic
/// lambda sum U^(d) + mgf_correction_exponent(lambda, d, energies).
std::vector<double> corrected_log_statistic(const SpectrumRun& run, double lambda, const ChannelSpec& spec);

/// E[exp(lambda sum U^(d)) * correction] estimated from a run.
MgfEstimate mgf_lhs_from_run(const SpectrumRun& run, double lambda, const ChannelSpec& spec);

/// E[exp(lambda sum U^(d))] without the correction factor.
MgfEstimate plain_mgf_from_run(const SpectrumRun& run, double lambda);

/// Simulates and estimates in one call (U taken at d = pstar).
MgfEstimate estimate_mgf_lhs(const FeedbackEncoder& enc_modified, double lambda, const PowerAllocation& pstar,
                             const ChannelSpec& spec, std::size_t trials, RngSeed seed, unsigned threads = 1);

/// Empirical distribution of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sample);

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }
  /// Fraction of the sample <= a.
  double cdf(double a) const;
  /// Fraction of the sample > a.
  double exceedance(double a) const;
  /// sup_a |F_n(a) - Phi(a)|.
  double ks_distance_normal() const;

 private:
  std::vector<double> sorted_;
};

/// Empirical CDF of sum U / sqrt(n V(P*)).
EmpiricalCdf empirical_spectrum_cdf(const SpectrumRun& run, const PowerAllocation& pstar, const ChannelSpec& spec);

}  // namespace fblock
