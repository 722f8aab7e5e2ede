#include "fblock/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fblock/allocation.hpp"
#include "fblock/bht.hpp"
#include "fblock/bounds.hpp"
#include "fblock/builtin_encoders.hpp"
#include "fblock/code_transforms.hpp"
#include "fblock/mc_stats.hpp"
#include "fblock/normal.hpp"
#include "fblock/power_type.hpp"
#include "fblock/spectrum.hpp"

namespace fblock {

namespace {

std::vector<std::string> encoders_of(const VerifyOptions& o) {
  return o.encoders.empty() ? builtin_encoder_names() : o.encoders;
}

double gamma_of(const VerifyOptions& o, std::size_t n) { return o.gamma < 0.0 ? default_gamma(n) : o.gamma; }

std::unique_ptr<FeedbackEncoder> encoder_for(const std::string& name, std::size_t n, const VerifyOptions& o) {
  EncoderConfig c;
  c.name = name;
  c.block_length = n;
  c.codebook_seed = o.seed.seed;
  return make_encoder(c, o.spec);
}

CheckResult check_gradient(const VerifyOptions& o) {
  const auto& spec = o.spec;
  const auto wf = waterfill(spec);
  double at_opt = 0.0;
  for (double g : lagrangian_gradient(wf.pstar, wf, spec)) at_opt = std::max(at_opt, std::abs(g));

  Rng rng(o.seed.substream(101));
  const double h = 1e-5;
  double fd_error = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(spec.channels());
    for (double& v : s) v = h + rng.uniform() * spec.power();
    const PowerAllocation sa(s);
    const auto grad = lagrangian_gradient(sa, wf, spec);
    for (std::size_t l = 0; l < s.size(); ++l) {
      auto up = s, down = s;
      up[l] += h;
      down[l] -= h;
      const double fd =
          (lagrangian(PowerAllocation(up), wf, spec) - lagrangian(PowerAllocation(down), wf, spec)) / (2.0 * h);
      fd_error = std::max(fd_error, std::abs(fd - grad[l]));
    }
  }
  const bool pass = at_opt < 1e-6 && fd_error < 1e-6;
  return {"gradient", pass, Json{{"max_gradient_at_pstar", at_opt}, {"max_finite_difference_error", fd_error}}};
}

CheckResult check_kappa(const VerifyOptions& o) {
  const auto& spec = o.spec;
  const auto wf = waterfill(spec);
  const double k = kappa(spec);
  const double c_opt = capacity(wf.pstar, spec);
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
  for_each_power_type(static_cast<std::uint32_t>(o.n), spec, [&](const PowerAllocation& s) {
    const double d = euclidean_distance(wf.pstar.values(), s.values());
    worst = std::min(worst, c_opt - capacity(s, spec) - k * d * d);
    ++count;
  });
  return {"kappa", worst >= -1e-12, Json{{"kappa", k}, {"types", count}, {"min_margin", worst}}};
}

std::vector<double> lambda_grid(const VerifyOptions& o, const PowerAllocation& pstar) {
  std::vector<double> grid =
      o.lambdas.empty() ? std::vector<double>{-0.5, -0.1, 0.1, 0.5, 1.0 / std::sqrt(static_cast<double>(o.n))}
                        : o.lambdas;
  std::erase_if(grid, [&](double lam) {
    for (std::size_t l = 0; l < pstar.size(); ++l) {
      if (!((1.0 + lam) * pstar[l] + o.spec.noise(l) > 0.0)) return true;
    }
    return false;
  });
  return grid;
}

CheckResult check_mgf(const VerifyOptions& o) {
  const auto wf = waterfill(o.spec);
  const double gamma = gamma_of(o, o.n);
  const auto grid = lambda_grid(o, wf.pstar);
  bool pass = true;
  Json rows = Json::array();
  const auto names = encoders_of(o);
  for (std::size_t e = 0; e < names.size(); ++e) {
    const auto enc = encoder_for(names[e], o.n, o);
    const auto modified = modify_code(*enc, o.spec, gamma, wf.pstar);
    const auto run = simulate_spectrum(*modified, o.spec, wf.pstar, wf.pstar, o.trials, o.seed.substream(e), o.threads);
    for (double lam : grid) {
      const auto est = mgf_lhs_from_run(run, lam, o.spec);
      const double closed = mgf_closed_form(lam, wf.pstar, o.spec, o.n);
      const double z = est.std_error > 0.0 ? (est.mean - closed) / est.std_error
                                           : (std::abs(est.mean - closed) <= 1e-12 * closed ? 0.0 : INFINITY);
      const bool ok = std::abs(z) <= 3.0;
      pass = pass && ok;
      rows.push_back(Json{{"encoder", names[e]}, {"lambda", lam}, {"estimate", est.mean},
                          {"std_error", est.std_error}, {"closed_form", closed}, {"z", z}, {"pass", ok}});
    }
  }
  return {"mgf", pass, Json{{"n", o.n}, {"trials", o.trials}, {"gamma", gamma}, {"results", rows}}};
}

CheckResult check_curtiss(const VerifyOptions& o) {
  const auto wf = waterfill(o.spec);
  Json rows = Json::array();
  std::vector<double> ks;
  const double a = phi_inv(o.eps + o.tau);
  for (std::size_t i = 0; i < o.curtiss_lengths.size(); ++i) {
    const std::size_t n = o.curtiss_lengths[i];
    const auto enc = encoder_for("toy-feedback", n, o);
    const auto modified = modify_code(*enc, o.spec, gamma_of(o, n), wf.pstar);
    const auto run = simulate_spectrum(*modified, o.spec, wf.pstar, wf.pstar, o.trials, o.seed.substream(i), o.threads);
    const auto cdf = empirical_spectrum_cdf(run, wf.pstar, o.spec);
    ks.push_back(cdf.ks_distance_normal());
    rows.push_back(Json{{"n", n}, {"ks_distance", ks.back()}, {"exceedance", cdf.exceedance(a)},
                        {"limit", 1.0 - o.eps - o.tau}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];
  const bool pass = !ks.empty() && decreasing && ks.back() <= o.ks_threshold;
  return {"curtiss", pass,
          Json{{"trials", o.trials}, {"ks_threshold", o.ks_threshold}, {"strictly_decreasing", decreasing},
               {"results", rows}}};
}

CheckResult check_box(const VerifyOptions& o) {
  const auto& spec = o.spec;
  const auto wf = waterfill(spec);
  const double gamma = gamma_of(o, o.n);
  const double L = static_cast<double>(spec.channels());
  const double nn = static_cast<double>(o.n);
  const double target = nn * spec.power();
  bool pass = true;
  Json rows = Json::array();
  const auto names = encoders_of(o);
  for (std::size_t e = 0; e < names.size(); ++e) {
    const auto enc = encoder_for(names[e], o.n, o);
    const auto modified = modify_code(*enc, spec, gamma, wf.pstar);
    const auto run = simulate_spectrum(*modified, spec, wf.pstar, wf.pstar, o.trials, o.seed.substream(e), o.threads);
    std::size_t box_fail = 0, total_fail = 0;
    double worst_total = 0.0;
    for (std::size_t t = 0; t < run.trials; ++t) {
      const auto energy = run.energy(t);
      double total = 0.0;
      bool in_box = in_bounding_box(run.power_type(t), wf.pstar, L * L * gamma + 1e-9 * spec.power());
      for (std::size_t l = 0; l < energy.size(); ++l) {
        total += energy[l];
        const double lo = nn * (wf.pstar[l] - L * gamma) - 1e-9 * target;
        const double hi = nn * (wf.pstar[l] + L * L * gamma) + 1e-9 * target;
        in_box = in_box && energy[l] >= lo && energy[l] <= hi;
      }
      const double rel = std::abs(total - target) / target;
      worst_total = std::max(worst_total, rel);
      box_fail += in_box ? 0 : 1;
      total_fail += rel <= 1e-9 ? 0 : 1;
    }

    // The discretized code must land on the lattice S^(n) in every trial.
    const auto disc = discretize_code(*enc, spec);
    const auto drun =
        simulate_spectrum(*disc, spec, wf.pstar, wf.pstar, o.trials, o.seed.substream(100 + e), o.threads);
    std::size_t lattice_fail = 0;
    for (std::size_t t = 0; t < drun.trials; ++t) {
      if (!lattice_counts(drun.power_type(t), static_cast<std::uint32_t>(drun.n), spec.power())) ++lattice_fail;
    }
    const bool ok = box_fail == 0 && total_fail == 0 && lattice_fail == 0;
    pass = pass && ok;
    rows.push_back(Json{{"encoder", names[e]}, {"box_violations", box_fail}, {"total_violations", total_fail},
                        {"max_relative_total_error", worst_total}, {"lattice_violations", lattice_fail},
                        {"pass", ok}});
  }
  return {"box", pass, Json{{"n", o.n}, {"gamma", gamma}, {"trials", o.trials}, {"results", rows}}};
}

DiscreteDistribution random_distribution(Rng& rng, std::size_t size, bool sparse) {
  std::vector<double> v(size);
  double sum = 0.0;
  for (double& x : v) {
    x = sparse && rng.uniform() < 0.25 ? 0.0 : -std::log(rng.uniform());
    sum += x;
  }
  if (sum == 0.0) v[0] = sum = 1.0;
  for (double& x : v) x /= sum;
  return DiscreteDistribution(std::move(v));
}

CheckResult check_beta(const VerifyOptions& o) {
  Rng rng(o.seed.substream(202));
  std::size_t dpi_fail = 0, lb_fail = 0, endpoint_fail = 0;
  const std::size_t instances = 1000;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t k = 2 + rng.below(11);
    const auto p = random_distribution(rng, k, true);
    const auto q = random_distribution(rng, k, true);
    const double delta = rng.uniform();
    const std::size_t out = 1 + rng.below(k);
    std::vector<std::size_t> g(k);
    for (auto& v : g) v = rng.below(out);
    if (!dpi_check(p, q, g, out, delta)) ++dpi_fail;
    const double xi = std::exp(4.0 * (rng.uniform() - 0.5));
    if (beta(delta, p, q) < beta_lower_bound(delta, xi, lr_tail(p, q, xi)) - 1e-12) ++lb_fail;
    if (beta(0.0, p, q) != 0.0) ++endpoint_fail;
  }
  const bool pass = dpi_fail == 0 && lb_fail == 0 && endpoint_fail == 0;
  return {"beta", pass,
          Json{{"instances", instances}, {"dpi_violations", dpi_fail}, {"lower_bound_violations", lb_fail},
               {"endpoint_violations", endpoint_fail}}};
}

CheckResult check_far(const VerifyOptions& o) {
  const auto& spec = o.spec;
  const auto wf = waterfill(spec);
  const double half_l = 0.5 * static_cast<double>(spec.channels());
  const double lam = 1.0 / std::sqrt(static_cast<double>(o.n));
  double worst = -std::numeric_limits<double>::infinity();
  for_each_power_type(static_cast<std::uint32_t>(o.n), spec, [&](const PowerAllocation& s) {
    worst = std::max(worst, log_mgf_closed_form(lam, s, spec, o.n) - half_l);
  });
  const double summed = summed_far_term_bound(o.n, spec, o.eps, o.tau, false);
  const double n0 = validity_threshold(spec, o.eps, o.tau);
  const bool pass = worst <= 1e-12 && std::isfinite(n0);
  return {"far", pass,
          Json{{"n", o.n}, {"max_log_mgf_minus_half_L", worst}, {"summed_far_term_bound", summed},
               {"analytic_far_term_bound", analytic_far_term_bound(static_cast<double>(o.n), spec, o.eps, o.tau)},
               {"n0", n0}}};
}

}  // namespace

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{"gradient", "kappa", "beta", "far", "box", "mgf", "curtiss"};
  return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& options) {
  if (name == "gradient") return check_gradient(options);
  if (name == "kappa") return check_kappa(options);
  if (name == "mgf") return check_mgf(options);
  if (name == "curtiss") return check_curtiss(options);
  if (name == "box") return check_box(options);
  if (name == "beta") return check_beta(options);
  if (name == "far") return check_far(options);
  throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace fblock
