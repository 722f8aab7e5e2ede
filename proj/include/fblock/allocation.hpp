#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// Water level, optimal allocation and the KKT multipliers of the inactive
/// channels.
struct WaterfillResult {
  double lambda = 0.0;
  PowerAllocation pstar;
  /// mu_l = 0 on active channels, 1/(2 lambda) - 1/(2 N_l) on inactive ones.
  std::vector<double> mu;
};

/// Optimal power split maximizing capacity() under sum power P.
///
/// The active set is found by sorting the noise levels and solving for the
/// water level in closed form, so sum(pstar) matches P to rounding.
WaterfillResult waterfill(const ChannelSpec& spec);

/// Largest violation among: |sum P_l - P|, |P_l - max(0, lambda - N_l)|,
/// negative mu_l, and the stationarity residual of the Lagrangian at P*.
double kkt_residual(const WaterfillResult& wf, const ChannelSpec& spec);

/// C(s) = sum_l 1/2 log(1 + s_l / N_l), nats per channel use.
double capacity(const PowerAllocation& s, const ChannelSpec& spec);

/// Gaussian dispersion V(s), nats^2 per channel use.
double dispersion(const PowerAllocation& s, const ChannelSpec& spec);

/// Normal approximation C(P*) + sqrt(V(P*)/n) phi_inv(eps), without the
/// O(log n / n) term. Throws std::domain_error for eps outside (0, 1).
double normal_approx_rate(const ChannelSpec& spec, std::size_t n, double eps);

/// f(s) = C(s) - (sum s_l - P)/(2 lambda) + sum mu_l s_l.
double lagrangian(const PowerAllocation& s, const WaterfillResult& wf, const ChannelSpec& spec);

/// Gradient of lagrangian(): 1/(2(N_l + s_l)) - 1/(2 lambda) + mu_l.
std::vector<double> lagrangian_gradient(const PowerAllocation& s, const WaterfillResult& wf,
                                        const ChannelSpec& spec);

/// v' H(s) v for the (diagonal) Hessian of the Lagrangian,
/// -1/2 sum_l v_l^2 / (N_l + s_l)^2.
double hessian_quadform(const PowerAllocation& s, std::span<const double> v, const ChannelSpec& spec);

/// Curvature constant 1/(4 (N_max + P)^2) of the capacity gap
/// C(P*) - C(s) >= kappa ||P* - s||^2 on the power simplex.
double kappa(const ChannelSpec& spec);

}  // namespace fblock
