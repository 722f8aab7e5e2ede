#include "fblock/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fblock/normal.hpp"

namespace fblock {

namespace {

void require_length(std::size_t size, const ChannelSpec& spec, const char* what) {
  if (size != spec.channels()) {
    throw std::invalid_argument(std::string(what) + ": expected one entry per sub-channel");
  }
}

}  // namespace

WaterfillResult waterfill(const ChannelSpec& spec) {
  const std::size_t L = spec.channels();
  std::vector<double> sorted(spec.noise().begin(), spec.noise().end());
  std::sort(sorted.begin(), sorted.end());

  // With the k quietest channels active, lambda = (P + sum of their N) / k.
  // The right k is the largest one whose level clears the k-th noise floor.
  double prefix = 0.0;
  double lambda = sorted[0] + spec.power();
  for (std::size_t k = 1; k <= L; ++k) {
    prefix += sorted[k - 1];
    const double level = (spec.power() + prefix) / static_cast<double>(k);
    if (level <= sorted[k - 1]) break;
    lambda = level;
  }

  std::vector<double> pstar(L);
  std::vector<double> mu(L);
  std::size_t active = 0;
  double used = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    if (lambda > spec.noise(l)) {
      ++active;
      used += lambda - spec.noise(l);
    }
  }
  // One correction pass absorbs the rounding left by lambda - N_l.
  lambda += (spec.power() - used) / static_cast<double>(active);
  for (std::size_t l = 0; l < L; ++l) {
    pstar[l] = std::max(0.0, lambda - spec.noise(l));
    mu[l] = pstar[l] > 0.0 ? 0.0 : 1.0 / (2.0 * lambda) - 1.0 / (2.0 * spec.noise(l));
  }
  return {lambda, PowerAllocation(std::move(pstar)), std::move(mu)};
}

double kkt_residual(const WaterfillResult& wf, const ChannelSpec& spec) {
  require_length(wf.pstar.size(), spec, "kkt_residual");
  double worst = std::abs(wf.pstar.total() - spec.power());
  const auto grad = lagrangian_gradient(wf.pstar, wf, spec);
  for (std::size_t l = 0; l < spec.channels(); ++l) {
    worst = std::max(worst, std::abs(wf.pstar[l] - std::max(0.0, wf.lambda - spec.noise(l))));
    worst = std::max(worst, std::max(0.0, -wf.mu[l]));
    worst = std::max(worst, std::abs(grad[l]));
    worst = std::max(worst, std::abs(wf.mu[l] * wf.pstar[l]));
  }
  return worst;
}

double capacity(const PowerAllocation& s, const ChannelSpec& spec) {
  require_length(s.size(), spec, "capacity");
  double sum = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) sum += 0.5 * std::log1p(s[l] / spec.noise(l));
  return sum;
}

double dispersion(const PowerAllocation& s, const ChannelSpec& spec) {
  require_length(s.size(), spec, "dispersion");
  double sum = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double snr = s[l] / spec.noise(l);
    sum += snr * (snr + 2.0) / (2.0 * (snr + 1.0) * (snr + 1.0));
  }
  return sum;
}

double normal_approx_rate(const ChannelSpec& spec, std::size_t n, double eps) {
  if (n == 0) throw std::invalid_argument("normal_approx_rate: block length must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("eps must lie in (0, 1)");
  const auto wf = waterfill(spec);
  const double c = capacity(wf.pstar, spec);
  if (eps == 0.5) return c;
  return c + std::sqrt(dispersion(wf.pstar, spec) / static_cast<double>(n)) * phi_inv(eps);
}

double lagrangian(const PowerAllocation& s, const WaterfillResult& wf, const ChannelSpec& spec) {
  require_length(s.size(), spec, "lagrangian");
  double penalty = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) penalty += wf.mu[l] * s[l];
  return capacity(s, spec) - (s.total() - spec.power()) / (2.0 * wf.lambda) + penalty;
}

std::vector<double> lagrangian_gradient(const PowerAllocation& s, const WaterfillResult& wf,
                                        const ChannelSpec& spec) {
  require_length(s.size(), spec, "lagrangian_gradient");
  std::vector<double> grad(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    grad[l] = 1.0 / (2.0 * (spec.noise(l) + s[l])) - 1.0 / (2.0 * wf.lambda) + wf.mu[l];
  }
  return grad;
}

double hessian_quadform(const PowerAllocation& s, std::span<const double> v, const ChannelSpec& spec) {
  require_length(s.size(), spec, "hessian_quadform");
  require_length(v.size(), spec, "hessian_quadform");
  double sum = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double d = spec.noise(l) + s[l];
    sum += v[l] * v[l] / (d * d);
  }
  return -0.5 * sum;
}

double kappa(const ChannelSpec& spec) {
  const double d = spec.max_noise() + spec.power();
  return 1.0 / (4.0 * d * d);
}

}  // namespace fblock
