#pragma once

#include <span>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/power_type.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// U_k^(d) = sum_l [-(d_l/N_l) z_l^2 + 2 x_l z_l + d_l] / [2 (d_l + N_l)], nats.
double u_term(const PowerAllocation& d, std::span<const double> x, std::span<const double> z, const ChannelSpec& spec);

/// V_k = u_term(pstar, sqrt(pstar), z).
double v_term(const PowerAllocation& pstar, std::span<const double> z, const ChannelSpec& spec);

/// Precomputed per-channel coefficients of u_term for a fixed d, for hot loops:
/// U = sum_l a_l z_l^2 + b_l x_l z_l + c_l.
struct UTermCoefficients {
  explicit UTermCoefficients(const PowerAllocation& d, const ChannelSpec& spec);
  double operator()(std::span<const double> x, std::span<const double> z) const;

  std::vector<double> a, b, c;
};

/// log r(y) for the auxiliary output law: an equal-weight mixture (total
/// weight 1/2) of i.i.d. N(0, s_l + N_l) laws over the power types s in
/// `sset`, plus weight 1/2 on the N(0, P*_l + N_l) law. Log-sum-exp stabilized.
double aux_output_logdensity(const BlockMatrix& y, const PowerTypeSet& sset, const PowerAllocation& pstar,
                             const ChannelSpec& spec);

/// log xi_n = n C(P*) + sqrt(n V(P*)) phi_inv(eps + tau) + log(2 cardinality).
/// Throws std::domain_error unless 0 < eps + tau < 1.
double log_xi(std::size_t n, const ChannelSpec& spec, double eps, double tau, double cardinality);

/// log of prod_l [(s_l+N_l)/((1+lambda)s_l+N_l)]^(n/2)
///        * exp(n sum_l [lambda s_l/(2(s_l+N_l)) + lambda^2 N_l s_l/(2(s_l+N_l)((1+lambda)s_l+N_l))]).
/// Throws std::domain_error where (1+lambda)s_l + N_l <= 0.
double log_mgf_closed_form(double lambda, const PowerAllocation& s, const ChannelSpec& spec, std::size_t n);
double mgf_closed_form(double lambda, const PowerAllocation& s, const ChannelSpec& spec, std::size_t n);

/// Exponent of the correction factor that turns E[exp(lambda sum U^(s))] into
/// the closed form: lambda^2 sum_l N_l (n s_l - E_l) / (2(s_l+N_l)((1+lambda)s_l+N_l)),
/// where E_l is the channel-l codeword energy.
double mgf_correction_exponent(double lambda, const PowerAllocation& s, std::span<const double> energies,
                               const ChannelSpec& spec, std::size_t n);

struct MgfBounds {
  double lower;
  double upper;
};

/// Bounds on E[exp((t/sqrt n) sum U^(P*))] for a code whose per-channel
/// energies lie within n L^2 gamma of n P*_l: the closed form at t/sqrt n
/// times exp(-/+ t^2 L^2 gamma sum_l N_l / (2 (P_l+N_l)(P_l+N_l+t P_l/sqrt n))).
MgfBounds mgf_sandwich_bounds(double t, std::size_t n, double gamma, const PowerAllocation& pstar,
                              const ChannelSpec& spec);

}  // namespace fblock
