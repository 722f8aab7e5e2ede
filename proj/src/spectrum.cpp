#include "fblock/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fblock/allocation.hpp"
#include "fblock/normal.hpp"

namespace fblock {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

UTermCoefficients::UTermCoefficients(const PowerAllocation& d, const ChannelSpec& spec) {
  require(d.size() == spec.channels(), "u_term: length mismatch");
  for (std::size_t l = 0; l < d.size(); ++l) {
    const double denom = 2.0 * (d[l] + spec.noise(l));
    a.push_back(-(d[l] / spec.noise(l)) / denom);
    b.push_back(2.0 / denom);
    c.push_back(d[l] / denom);
  }
}

double UTermCoefficients::operator()(std::span<const double> x, std::span<const double> z) const {
  double u = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) u += a[l] * z[l] * z[l] + b[l] * x[l] * z[l] + c[l];
  return u;
}

double u_term(const PowerAllocation& d, std::span<const double> x, std::span<const double> z,
              const ChannelSpec& spec) {
  require(d.size() == spec.channels() && x.size() == d.size() && z.size() == d.size(), "u_term: length mismatch");
  double u = 0.0;
  for (std::size_t l = 0; l < d.size(); ++l) {
    const double N = spec.noise(l);
    u += (-(d[l] / N) * z[l] * z[l] + 2.0 * x[l] * z[l] + d[l]) / (2.0 * (d[l] + N));
  }
  return u;
}

double v_term(const PowerAllocation& pstar, std::span<const double> z, const ChannelSpec& spec) {
  require(pstar.size() == spec.channels() && z.size() == pstar.size(), "v_term: length mismatch");
  std::vector<double> x(pstar.size());
  for (std::size_t l = 0; l < x.size(); ++l) x[l] = std::sqrt(pstar[l]);
  return u_term(pstar, x, z, spec);
}

double aux_output_logdensity(const BlockMatrix& y, const PowerTypeSet& sset, const PowerAllocation& pstar,
                             const ChannelSpec& spec) {
  const std::size_t L = spec.channels();
  require(y.rows() == L && sset.channels() == L && pstar.size() == L, "aux_output_logdensity: size mismatch");
  require(y.cols() > 0 && !sset.empty(), "aux_output_logdensity: empty input");
  const double n = static_cast<double>(y.cols());
  std::vector<double> energy(L);
  for (std::size_t l = 0; l < L; ++l) energy[l] = y.row_energy(l);

  auto log_product = [&](auto&& variance_of) {
    double v = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double var = variance_of(l);
      v += -0.5 * n * std::log(2.0 * std::numbers::pi * var) - energy[l] / (2.0 * var);
    }
    return v;
  };

  std::vector<double> terms;
  terms.reserve(sset.size() + 1);
  const double log_weight = -std::log(2.0 * static_cast<double>(sset.size()));
  const double scale = sset.power() / sset.block_length();
  for (std::size_t i = 0; i < sset.size(); ++i) {
    const auto a = sset.counts(i);
    terms.push_back(log_weight + log_product([&](std::size_t l) { return scale * a[l] + spec.noise(l); }));
  }
  terms.push_back(-std::log(2.0) + log_product([&](std::size_t l) { return pstar[l] + spec.noise(l); }));

  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

double log_xi(std::size_t n, const ChannelSpec& spec, double eps, double tau, double cardinality) {
  if (!(eps + tau > 0.0 && eps + tau < 1.0)) throw std::domain_error("eps + tau must lie in (0, 1)");
  require(cardinality >= 1.0, "log_xi: cardinality must be at least 1");
  const auto wf = waterfill(spec);
  const double nn = static_cast<double>(n);
  const double q = eps + tau == 0.5 ? 0.0 : phi_inv(eps + tau);
  return nn * capacity(wf.pstar, spec) + std::sqrt(nn * dispersion(wf.pstar, spec)) * q +
         std::log(2.0 * cardinality);
}

double log_mgf_closed_form(double lambda, const PowerAllocation& s, const ChannelSpec& spec, std::size_t n) {
  require(s.size() == spec.channels(), "mgf_closed_form: length mismatch");
  const double nn = static_cast<double>(n);
  double log_value = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double N = spec.noise(l);
    const double base = s[l] + N;
    const double tilted = (1.0 + lambda) * s[l] + N;
    if (!(tilted > 0.0)) throw std::domain_error("mgf_closed_form: lambda outside the MGF domain");
    log_value += 0.5 * nn * std::log(base / tilted);
    log_value += nn * (lambda * s[l] / (2.0 * base) + lambda * lambda * N * s[l] / (2.0 * base * tilted));
  }
  return log_value;
}

double mgf_closed_form(double lambda, const PowerAllocation& s, const ChannelSpec& spec, std::size_t n) {
  return std::exp(log_mgf_closed_form(lambda, s, spec, n));
}

double mgf_correction_exponent(double lambda, const PowerAllocation& s, std::span<const double> energies,
                               const ChannelSpec& spec, std::size_t n) {
  require(s.size() == spec.channels() && energies.size() == s.size(), "mgf_correction_exponent: length mismatch");
  const double nn = static_cast<double>(n);
  double e = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double N = spec.noise(l);
    const double tilted = (1.0 + lambda) * s[l] + N;
    if (!(tilted > 0.0)) throw std::domain_error("mgf_correction_exponent: lambda outside the MGF domain");
    e += N * (nn * s[l] - energies[l]) / (2.0 * (s[l] + N) * tilted);
  }
  return lambda * lambda * e;
}

MgfBounds mgf_sandwich_bounds(double t, std::size_t n, double gamma, const PowerAllocation& pstar,
                              const ChannelSpec& spec) {
  require(pstar.size() == spec.channels(), "mgf_sandwich_bounds: length mismatch");
  const double rn = std::sqrt(static_cast<double>(n));
  const double L = static_cast<double>(spec.channels());
  const double centre = mgf_closed_form(t / rn, pstar, spec, n);
  double width = 0.0;
  for (std::size_t l = 0; l < pstar.size(); ++l) {
    const double base = pstar[l] + spec.noise(l);
    width += spec.noise(l) / (2.0 * base * (base + t * pstar[l] / rn));
  }
  width *= t * t * L * L * gamma;
  return {centre * std::exp(-width), centre * std::exp(width)};
}

}  // namespace fblock
