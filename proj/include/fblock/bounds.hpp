#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "fblock/allocation.hpp"
#include "fblock/channel.hpp"
#include "fblock/encoder.hpp"
#include "fblock/rng.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

inline constexpr double kDefaultTau = 0.05;

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Converse bound on log M for block length n, with its decomposition.
/// All log quantities are in nats; *_bits fields repeat them in bits.
struct ConverseReport {
  std::size_t n = 0;
  double eps = 0.0;
  double tau = 0.0;
  bool exact_cardinality = false;

  double first_order = 0.0;  ///< n C(P*)
  double log_m_bound = 0.0;
  double log_m_bound_bits = 0.0;
  double second_order = 0.0;        ///< (log_m_bound - n C(P*)) / sqrt(n)
  double second_order_limit = 0.0;  ///< sqrt(V(P*)) phi_inv(eps + tau)

  double far_term_bound = 0.0;  ///< sum of the per-type large-deviation bounds
  double n0 = 0.0;              ///< far term <= tau/2 for all n >= n0 (analytic form)
  bool far_term_valid = false;  ///< n >= n0

  std::optional<ProbabilityEstimate> near_term;
};

/// Large-deviation bound on the probability that a far type s triggers the
/// information-spectrum event:
///   uniform: e^{L/2} / e^{kappa n^{1/6} + sqrt(V(P*)) phi_inv(eps+tau)}
///   tight:   mgf_closed_form(1/sqrt n, s) / e^{kappa sqrt(n) ||P*-s||^2 + sqrt(V(P*)) phi_inv(eps+tau)}
double far_type_tail_bound(const PowerAllocation& s, std::size_t n, const ChannelSpec& spec,
                           const WaterfillResult& wf, double eps, double tau, bool tight = false);

/// The bound summed over every far type. The uniform form multiplies by
/// |S \ Pi|; the tight form walks the lattice (cost |S|).
double summed_far_term_bound(std::size_t n, const ChannelSpec& spec, double eps, double tau, bool tight = false);

/// n^L e^{L/2} e^{-kappa n^{1/6} - sqrt(V) phi_inv(eps+tau)}: the summed bound
/// with |S \ Pi| replaced by n^L. Computed in log space; n may be huge.
double log_analytic_far_term_bound(double n, const ChannelSpec& spec, double eps, double tau);
double analytic_far_term_bound(double n, const ChannelSpec& spec, double eps, double tau);

/// Smallest integer n0 >= L + 2 such that the analytic far-term bound is at
/// most tau/2 for every n >= n0. Returned as a double because it is often
/// far beyond 64-bit range.
double validity_threshold(const ChannelSpec& spec, double eps, double tau);

/// n C(P*) + sqrt(n V(P*)) phi_inv(eps+tau) + log(2 n^L) - log(tau/2), or with
/// log(2 |S^(n)|) in place of log(2 n^L) when exact_cardinality is set.
/// Throws std::domain_error unless eps in (0,1), tau > 0, eps + tau < 1.
ConverseReport converse_log_m_bound(std::size_t n, const ChannelSpec& spec, double eps, double tau,
                                    bool exact_cardinality = false);

/// Monte Carlo estimate of P{sum U / sqrt(n V(P*)) > phi_inv(eps+tau)} under
/// the (gamma, P*)-modified version of enc (gamma < 0 selects n^(-1/6)).
ProbabilityEstimate verify_near_term(const FeedbackEncoder& enc, const ChannelSpec& spec, double eps, double tau,
                                     std::size_t trials, RngSeed seed, double gamma = -1.0, unsigned threads = 1);

}  // namespace fblock
