#include "fblock/mc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "fblock/allocation.hpp"
#include "fblock/normal.hpp"
#include "fblock/parallel.hpp"
#include "fblock/spectrum.hpp"

namespace fblock {

namespace {

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

PowerType SpectrumRun::power_type(std::size_t trial) const {
  const auto e = energy(trial);
  std::vector<double> t(e.begin(), e.end());
  for (double& v : t) v /= static_cast<double>(n);
  return PowerType(std::move(t));
}

SpectrumRun simulate_spectrum(const FeedbackEncoder& prototype, const ChannelSpec& spec, const PowerAllocation& d,
                              const PowerAllocation& pstar, std::size_t trials, RngSeed seed, unsigned threads) {
  if (trials == 0) throw std::invalid_argument("simulate_spectrum: trials must be positive");
  const std::size_t L = spec.channels();
  if (prototype.channels() != L || d.size() != L || pstar.size() != L) {
    throw std::invalid_argument("simulate_spectrum: size mismatch");
  }
  SpectrumRun run;
  run.n = prototype.block_length();
  run.channels = L;
  run.trials = trials;
  run.seed = seed;
  run.d = d;
  run.sums_u.resize(trials);
  run.sums_v.resize(trials);
  run.energies.resize(trials * L);
  run.messages.resize(trials);

  const UTermCoefficients u_coef(d, spec);
  const UTermCoefficients v_coef(pstar, spec);
  std::vector<double> root_pstar(L);
  for (std::size_t l = 0; l < L; ++l) root_pstar[l] = std::sqrt(pstar[l]);

  parallel_for(trials, threads, [&](unsigned, std::size_t begin, std::size_t end) {
    auto enc = prototype.clone();
    std::vector<double> x(L), z(L), y(L);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(seed.substream(t));
      const std::uint64_t w = rng.below(enc->message_count());
      enc->begin(w);
      double su = 0.0;
      double sv = 0.0;
      double* energy = run.energies.data() + t * L;
      for (std::size_t k = 0; k < run.n; ++k) {
        enc->emit(k == 0 ? std::span<const double>{} : std::span<const double>(y), x);
        draw_noise_column(spec, rng, z);
        su += u_coef(x, z);
        sv += v_coef(root_pstar, z);
        for (std::size_t l = 0; l < L; ++l) {
          energy[l] += x[l] * x[l];
          y[l] = x[l] + z[l];
        }
      }
      run.sums_u[t] = su;
      run.sums_v[t] = sv;
      run.messages[t] = w;
    }
  });
  return run;
}

MgfEstimate estimate_exp_mean(std::span<const double> log_values) {
  if (log_values.empty()) throw std::invalid_argument("estimate_exp_mean: empty sample");
  const double top = *std::max_element(log_values.begin(), log_values.end());
  MgfEstimate est;
  est.trials = log_values.size();
  if (!std::isfinite(top)) {
    if (top < 0) return est;  // every term is exp(-inf) = 0
    throw std::overflow_error("estimate_exp_mean: infinite exponent");
  }
  Neumaier s1, s2;
  for (double v : log_values) {
    const double w = std::exp(v - top);
    s1.add(w);
    s2.add(w * w);
  }
  const double T = static_cast<double>(est.trials);
  const double m = s1.value() / T;
  const double var = est.trials > 1 ? std::max(0.0, (s2.value() - T * m * m) / (T - 1.0)) : 0.0;
  est.log_mean = top + std::log(m);
  est.mean = std::exp(est.log_mean);
  est.log_std_error = std::sqrt(var / T) / m;
  est.std_error = est.mean * est.log_std_error;
  return est;
}

std::vector<double> corrected_log_statistic(const SpectrumRun& run, double lambda, const ChannelSpec& spec) {
  std::vector<double> out(run.trials);
  for (std::size_t t = 0; t < run.trials; ++t) {
    out[t] = lambda * run.sums_u[t] + mgf_correction_exponent(lambda, run.d, run.energy(t), spec, run.n);
  }
  return out;
}

MgfEstimate mgf_lhs_from_run(const SpectrumRun& run, double lambda, const ChannelSpec& spec) {
  return estimate_exp_mean(corrected_log_statistic(run, lambda, spec));
}

MgfEstimate plain_mgf_from_run(const SpectrumRun& run, double lambda) {
  std::vector<double> out(run.trials);
  for (std::size_t t = 0; t < run.trials; ++t) out[t] = lambda * run.sums_u[t];
  return estimate_exp_mean(out);
}

MgfEstimate estimate_mgf_lhs(const FeedbackEncoder& enc_modified, double lambda, const PowerAllocation& pstar,
                             const ChannelSpec& spec, std::size_t trials, RngSeed seed, unsigned threads) {
  for (std::size_t l = 0; l < pstar.size(); ++l) {
    if (!((1.0 + lambda) * pstar[l] + spec.noise(l) > 0.0)) {
      throw std::domain_error("estimate_mgf_lhs: lambda outside the MGF domain");
    }
  }
  const auto run = simulate_spectrum(enc_modified, spec, pstar, pstar, trials, seed, threads);
  return mgf_lhs_from_run(run, lambda, spec);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::cdf(double a) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), a);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::exceedance(double a) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), a);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::ks_distance_normal() const {
  const double T = static_cast<double>(sorted_.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    const double f = phi(sorted_[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / T - f, f - static_cast<double>(i) / T});
  }
  return worst;
}

EmpiricalCdf empirical_spectrum_cdf(const SpectrumRun& run, const PowerAllocation& pstar, const ChannelSpec& spec) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(run.n) * dispersion(pstar, spec));
  std::vector<double> sample(run.sums_u);
  for (double& v : sample) v *= scale;
  return EmpiricalCdf(std::move(sample));
}

}  // namespace fblock
