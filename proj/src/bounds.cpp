#include "fblock/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fblock/code_transforms.hpp"
#include "fblock/mc_stats.hpp"
#include "fblock/normal.hpp"
#include "fblock/power_type.hpp"
#include "fblock/spectrum.hpp"

namespace fblock {

namespace {

void check_eps_tau(double eps, double tau) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("eps must lie in (0, 1)");
  if (!(tau > 0.0)) throw std::domain_error("tau must be positive");
  if (!(eps + tau < 1.0)) throw std::domain_error("eps + tau must be below 1");
}

double quantile(double p) { return p == 0.5 ? 0.0 : phi_inv(p); }

// sqrt(V(P*)) phi_inv(eps + tau)
double spectrum_offset(const ChannelSpec& spec, const WaterfillResult& wf, double eps, double tau) {
  return std::sqrt(dispersion(wf.pstar, spec)) * quantile(eps + tau);
}

}  // namespace

double far_type_tail_bound(const PowerAllocation& s, std::size_t n, const ChannelSpec& spec,
                           const WaterfillResult& wf, double eps, double tau, bool tight) {
  check_eps_tau(eps, tau);
  if (n == 0) throw std::invalid_argument("far_type_tail_bound: block length must be positive");
  const double nn = static_cast<double>(n);
  const double offset = spectrum_offset(spec, wf, eps, tau);
  if (!tight) {
    return std::exp(0.5 * static_cast<double>(spec.channels()) - kappa(spec) * std::cbrt(std::sqrt(nn)) - offset);
  }
  const double dist = euclidean_distance(wf.pstar.values(), s.values());
  return std::exp(log_mgf_closed_form(1.0 / std::sqrt(nn), s, spec, n) - kappa(spec) * std::sqrt(nn) * dist * dist -
                  offset);
}

double summed_far_term_bound(std::size_t n, const ChannelSpec& spec, double eps, double tau, bool tight) {
  check_eps_tau(eps, tau);
  if (n == 0 || n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("summed_far_term_bound: block length out of range");
  }
  const auto wf = waterfill(spec);
  const auto n32 = static_cast<std::uint32_t>(n);
  if (!tight) {
    const double per_type = far_type_tail_bound(wf.pstar, n, spec, wf, eps, tau, false);
    const std::uint64_t far = composition_count(n, spec.channels()) - count_near_optimal(n32, spec, wf.pstar);
    return static_cast<double>(far) * per_type;
  }
  const double radius = std::pow(static_cast<double>(n), -kNearRadiusExponent);
  const double scale = spec.power() / static_cast<double>(n);
  const std::size_t L = spec.channels();
  std::vector<double> s(L);
  double total = 0.0;
  CompositionIterator it(n32, L);
  do {
    const auto a = it.current();
    double d2 = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      s[l] = scale * a[l];
      d2 += (s[l] - wf.pstar[l]) * (s[l] - wf.pstar[l]);
    }
    if (std::sqrt(d2) > radius) total += far_type_tail_bound(PowerAllocation(s), n, spec, wf, eps, tau, true);
  } while (it.next());
  return total;
}

double log_analytic_far_term_bound(double n, const ChannelSpec& spec, double eps, double tau) {
  check_eps_tau(eps, tau);
  if (!(n >= 1.0)) throw std::invalid_argument("analytic_far_term_bound: n must be >= 1");
  const auto wf = waterfill(spec);
  const double L = static_cast<double>(spec.channels());
  return L * std::log(n) + 0.5 * L - kappa(spec) * std::pow(n, 1.0 / 6.0) - spectrum_offset(spec, wf, eps, tau);
}

double analytic_far_term_bound(double n, const ChannelSpec& spec, double eps, double tau) {
  return std::exp(log_analytic_far_term_bound(n, spec, eps, tau));
}

double validity_threshold(const ChannelSpec& spec, double eps, double tau) {
  check_eps_tau(eps, tau);
  const auto wf = waterfill(spec);
  const double L = static_cast<double>(spec.channels());
  const double k = kappa(spec);
  const double c = 0.5 * L - spectrum_offset(spec, wf, eps, tau) - std::log(tau / 2.0);
  // In u = log n the excess g(u) = L u - k e^{u/6} + c is concave with its
  // peak at u* = 6 log(6L/k); beyond u* it decreases to -infinity.
  auto g = [&](double u) { return L * u - k * std::exp(u / 6.0) + c; };
  const double floor_n = L + 2.0;
  const double u_floor = std::log(floor_n);
  const double u_peak = 6.0 * std::log(6.0 * L / k);
  // Past max(u_floor, u_peak) g is decreasing; if it is already <= 0 there,
  // the bound holds from the floor on.
  const double lo_start = std::max(u_floor, u_peak);
  if (g(lo_start) <= 0.0) return floor_n;
  double lo = lo_start;
  double hi = lo + 1.0;
  while (g(hi) > 0.0) hi = lo + 2.0 * (hi - lo);
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  double n0 = std::ceil(std::exp(hi));
  // Guard the rounding at the root: step forward while the bound still fails.
  while (n0 < 1e15 && log_analytic_far_term_bound(n0, spec, eps, tau) > std::log(tau / 2.0)) n0 += 1.0;
  return std::max(n0, floor_n);
}

ConverseReport converse_log_m_bound(std::size_t n, const ChannelSpec& spec, double eps, double tau,
                                    bool exact_cardinality) {
  check_eps_tau(eps, tau);
  if (n < 2) throw std::invalid_argument("converse_log_m_bound: block length must be at least 2");
  const auto wf = waterfill(spec);
  const double nn = static_cast<double>(n);
  const double L = static_cast<double>(spec.channels());

  ConverseReport r;
  r.n = n;
  r.eps = eps;
  r.tau = tau;
  r.exact_cardinality = exact_cardinality;
  r.first_order = nn * capacity(wf.pstar, spec);
  r.second_order_limit = spectrum_offset(spec, wf, eps, tau);
  const double log_card = exact_cardinality ? log_composition_count(nn, spec.channels()) : L * std::log(nn);
  r.log_m_bound = r.first_order + std::sqrt(nn) * r.second_order_limit + std::log(2.0) + log_card -
                  std::log(tau / 2.0);
  r.log_m_bound_bits = r.log_m_bound / std::log(2.0);
  r.second_order = (r.log_m_bound - r.first_order) / std::sqrt(nn);

  // Exact far-type count when it fits, the n^L bound otherwise.
  double far_count = std::pow(nn, L);
  if (n <= std::numeric_limits<std::uint32_t>::max()) {
    try {
      const std::uint64_t all = composition_count(n, spec.channels());
      far_count = static_cast<double>(all - count_near_optimal(static_cast<std::uint32_t>(n), spec, wf.pstar));
    } catch (const std::overflow_error&) {
    }
  }
  r.far_term_bound = far_count * far_type_tail_bound(wf.pstar, n, spec, wf, eps, tau, false);
  r.n0 = validity_threshold(spec, eps, tau);
  r.far_term_valid = nn >= r.n0;
  return r;
}

ProbabilityEstimate verify_near_term(const FeedbackEncoder& enc, const ChannelSpec& spec, double eps, double tau,
                                     std::size_t trials, RngSeed seed, double gamma, unsigned threads) {
  check_eps_tau(eps, tau);
  if (trials == 0) throw std::invalid_argument("verify_near_term: trials must be positive");
  const auto wf = waterfill(spec);
  const double g = gamma < 0.0 ? default_gamma(enc.block_length()) : gamma;
  const auto modified = modify_code(enc, spec, g, wf.pstar);
  const auto run = simulate_spectrum(*modified, spec, wf.pstar, wf.pstar, trials, seed, threads);
  const auto cdf = empirical_spectrum_cdf(run, wf.pstar, spec);
  const double p = cdf.exceedance(quantile(eps + tau));
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

}  // namespace fblock
