#include "fblock/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "fblock/allocation.hpp"
#include "fblock/bht.hpp"
#include "fblock/bounds.hpp"
#include "fblock/builtin_encoders.hpp"
#include "fblock/code_transforms.hpp"
#include "fblock/json_io.hpp"
#include "fblock/mc_stats.hpp"
#include "fblock/normal.hpp"
#include "fblock/spectrum.hpp"
#include "fblock/verify.hpp"

namespace fblock {

namespace {

struct ChannelArgs {
  std::vector<double> noise;
  double power = 0.0;

  ChannelSpec spec() const { return ChannelSpec(noise, power); }
};

void add_channel_options(CLI::App* cmd, ChannelArgs& c, bool required) {
  auto* noise = cmd->add_option("--noise", c.noise, "Noise variances N_l, comma separated (variance units)")
                    ->delimiter(',');
  auto* power = cmd->add_option("--power", c.power, "Power budget P per channel use (power units)");
  if (required) {
    noise->required();
    power->required();
  } else {
    noise->capture_default_str();
    power->capture_default_str();
  }
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FBLOCK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

// Turns a JSON config into extra argv entries for `command`, skipping keys
// the user passed explicitly so flags always win.
std::vector<std::string> config_args(const std::string& path, const std::vector<std::string>& explicit_args) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  if (j.contains("channel")) {
    const Json ch = j["channel"];
    j.erase("channel");
    for (auto it = ch.begin(); it != ch.end(); ++it) {
      if (!j.contains(it.key())) j[it.key()] = it.value();
    }
  }
  auto given = [&](const std::string& flag) {
    for (const auto& a : explicit_args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto scalar = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    return v.dump();
  };
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string flag = "--" + it.key();
    if (it.key() == "config" || given(flag)) continue;
    const Json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string value;
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) value += (i ? "," : "") + scalar(v[i]);
    } else {
      value = scalar(v);
    }
    out.push_back(flag + "=" + value);
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> merged{args.front()};
  const auto extra = config_args(path, args);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-blocklength toolkit for the parallel Gaussian channel with feedback.\n"
               "Information quantities are in nats unless --bits is given."};
  app.name("fblock");
  app.require_subcommand(1);
  std::string config_path;
  unsigned threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file of option values; explicit flags take precedence");
  };

  // waterfill
  ChannelArgs wf_args;
  auto* wf_cmd = app.add_subcommand(
      "waterfill", "Water-filling allocation P*, level lambda and multipliers mu (JSON). capacity_nats is in nats "
                   "per channel use, dispersion_nats2 in nats^2.");
  add_channel_options(wf_cmd, wf_args, true);
  add_common(wf_cmd);

  // rate
  ChannelArgs rate_args;
  std::vector<std::size_t> rate_n{100, 1000, 10000, 100000};
  double rate_eps = 0.1;
  double rate_tau = kDefaultTau;
  bool rate_bits = false;
  bool rate_exact = false;
  auto* rate_cmd = app.add_subcommand(
      "rate", "CSV sweep n,achievable_na,converse,second_order. The first three columns are rates per channel use "
              "(nats, or bits with --bits); second_order is (log M bound - n C)/sqrt(n).");
  add_channel_options(rate_cmd, rate_args, true);
  rate_cmd->add_option("--n", rate_n, "Block lengths, comma separated")->delimiter(',')->capture_default_str();
  rate_cmd->add_option("--eps", rate_eps, "Error probability in (0,1)")->capture_default_str();
  rate_cmd->add_option("--tau", rate_tau, "Slack tau > 0 of the converse bound")->capture_default_str();
  rate_cmd->add_flag("--bits", rate_bits, "Report rates in bits instead of nats");
  rate_cmd->add_flag("--exact-cardinality", rate_exact, "Use log(2|S^(n)|) instead of log(2 n^L)");
  add_common(rate_cmd);

  // beta
  std::string beta_p, beta_q;
  double beta_delta = 0.5;
  auto* beta_cmd = app.add_subcommand(
      "beta", "Exact Neyman-Pearson beta_delta(p||q) on a finite alphabet (JSON). beta is a probability and "
              "size_bound = 1/beta a message count; neither is in nats or bits.");
  beta_cmd->add_option("--p", beta_p, "Distribution p as a JSON array")->required();
  beta_cmd->add_option("--q", beta_q, "Distribution q as a JSON array")->required();
  beta_cmd->add_option("--delta", beta_delta, "Required p-probability of acceptance, in [0,1]")->capture_default_str();
  add_common(beta_cmd);

  // simulate
  ChannelArgs sim_args;
  EncoderConfig sim_enc;
  std::size_t sim_trials = 10000;
  std::uint64_t sim_seed = 1;
  double sim_gamma = -1.0;
  bool sim_raw = false;
  std::optional<double> sim_lambda;
  double sim_eps = 0.1, sim_tau = kDefaultTau;
  std::string sim_csv;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo run of a built-in encoder through the feedback loop. Prints a JSON summary; "
                  "per-trial sums (nats) go to --csv.");
  add_channel_options(sim_cmd, sim_args, true);
  sim_cmd->add_option("--encoder", sim_enc.name, "iid-gaussian | sphere | toy-feedback")->capture_default_str();
  sim_cmd->add_option("--n", sim_enc.block_length, "Block length")->capture_default_str();
  sim_cmd->add_option("--messages", sim_enc.message_count, "Number of messages M")->capture_default_str();
  sim_cmd->add_option("--trials", sim_trials, "Monte Carlo trials")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--gamma", sim_gamma, "Box half-width of the modified code; negative means n^(-1/6)")
      ->capture_default_str();
  sim_cmd->add_flag("--unmodified", sim_raw, "Simulate the encoder itself instead of its (gamma,P*)-modified version");
  sim_cmd->add_option("--lambda", sim_lambda, "MGF argument (default 1/sqrt(n))");
  sim_cmd->add_option("--eps", sim_eps, "eps for the reported exceedance probability")->capture_default_str();
  sim_cmd->add_option("--tau", sim_tau, "tau for the reported exceedance probability")->capture_default_str();
  sim_cmd->add_option("--csv", sim_csv, "Write per-trial trial,message,sum_u,sum_v,type_1..type_L here");
  sim_cmd->add_option("--threads", threads, "Worker threads (default: FBLOCK_THREADS or all cores)");
  add_common(sim_cmd);

  // verify
  ChannelArgs ver_args{{1.0, 1.2}, 0.5};
  VerifyOptions ver;
  std::vector<std::string> ver_checks;
  std::uint64_t ver_seed = ver.seed.seed;
  auto* ver_cmd = app.add_subcommand(
      "verify", "Numerical checks, reported as JSON; exit status 1 if any selected check fails. Log-domain "
              "margins are in nats.");
  add_channel_options(ver_cmd, ver_args, false);
  ver_cmd->add_option("--check", ver_checks, "gradient | kappa | beta | far | box | mgf | curtiss (default: all)")
      ->delimiter(',')
      ->check(CLI::IsMember(verify_check_names()));
  ver_cmd->add_option("--n", ver.n, "Block length for gradient/kappa/far/box/mgf")->capture_default_str();
  ver_cmd->add_option("--trials", ver.trials, "Monte Carlo trials per encoder and length")->capture_default_str();
  ver_cmd->add_option("--seed", ver_seed, "Random seed")->capture_default_str();
  ver_cmd->add_option("--gamma", ver.gamma, "Box half-width; negative means n^(-1/6)")->capture_default_str();
  ver_cmd->add_option("--eps", ver.eps, "eps")->capture_default_str();
  ver_cmd->add_option("--tau", ver.tau, "tau")->capture_default_str();
  ver_cmd->add_option("--encoder", ver.encoders, "Encoders to exercise (default: all built-ins)")->delimiter(',');
  ver_cmd->add_option("--lambda", ver.lambdas, "MGF arguments (default -0.5,-0.1,0.1,0.5,1/sqrt(n))")
      ->delimiter(',');
  ver_cmd->add_option("--curtiss-n", ver.curtiss_lengths, "Block lengths for the curtiss check")
      ->delimiter(',')
      ->capture_default_str();
  ver_cmd->add_option("--ks-threshold", ver.ks_threshold, "KS bound at the largest curtiss length")
      ->capture_default_str();
  ver_cmd->add_option("--threads", threads, "Worker threads (default: FBLOCK_THREADS or all cores)");
  add_common(ver_cmd);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*wf_cmd) {
      const auto spec = wf_args.spec();
      const auto wf = waterfill(spec);
      Json j = to_json(wf);
      j["capacity_nats"] = capacity(wf.pstar, spec);
      j["dispersion_nats2"] = dispersion(wf.pstar, spec);
      out << j.dump() << "\n";
      return 0;
    }
    if (*rate_cmd) {
      const auto spec = rate_args.spec();
      const double unit = rate_bits ? std::log(2.0) : 1.0;
      out << "n,achievable_na,converse,second_order\n";
      for (std::size_t n : rate_n) {
        const auto report = converse_log_m_bound(n, spec, rate_eps, rate_tau, rate_exact);
        out << n << ',' << format_number(normal_approx_rate(spec, n, rate_eps) / unit) << ','
            << format_number(report.log_m_bound / static_cast<double>(n) / unit) << ','
            << format_number(report.second_order / unit) << "\n";
      }
      return 0;
    }
    if (*beta_cmd) {
      const DiscreteDistribution p(Json::parse(beta_p).get<std::vector<double>>());
      const DiscreteDistribution q(Json::parse(beta_q).get<std::vector<double>>());
      const double b = beta(beta_delta, p, q);
      out << Json{{"delta", beta_delta}, {"beta", b}, {"size_bound", b > 0.0 ? Json(metaconverse_size_bound(b)) : Json(nullptr)}}.dump() << "\n";
      return 0;
    }
    if (*sim_cmd) {
      const auto spec = sim_args.spec();
      const auto wf = waterfill(spec);
      const auto enc = make_encoder(sim_enc, spec);
      const std::size_t n = sim_enc.block_length;
      const double gamma = sim_gamma < 0.0 ? default_gamma(n) : sim_gamma;
      std::unique_ptr<FeedbackEncoder> used = sim_raw ? enc->clone() : modify_code(*enc, spec, gamma, wf.pstar);
      if (sim_trials == 0) throw std::invalid_argument("trials must be positive");
      const auto run =
          simulate_spectrum(*used, spec, wf.pstar, wf.pstar, sim_trials, RngSeed{sim_seed, 0}, resolve_threads(threads));
      const double lam = sim_lambda.value_or(1.0 / std::sqrt(static_cast<double>(n)));
      const auto est = mgf_lhs_from_run(run, lam, spec);
      const auto cdf = empirical_spectrum_cdf(run, wf.pstar, spec);
      if (!sim_csv.empty()) {
        std::ofstream csv(sim_csv);
        if (!csv) throw std::invalid_argument("cannot write '" + sim_csv + "'");
        csv << "trial,message,sum_u,sum_v";
        for (std::size_t l = 0; l < spec.channels(); ++l) csv << ",type_" << l + 1;
        csv << "\n" << std::setprecision(17);
        for (std::size_t t = 0; t < run.trials; ++t) {
          csv << t << ',' << run.messages[t] << ',' << run.sums_u[t] << ',' << run.sums_v[t];
          for (double e : run.energy(t)) csv << ',' << e / static_cast<double>(n);
          csv << "\n";
        }
      }
      Json j{{"encoder", sim_enc.name},
             {"n", n},
             {"trials", sim_trials},
             {"modified", !sim_raw},
             {"gamma", sim_raw ? Json(nullptr) : Json(gamma)},
             {"lambda", lam},
             {"estimate", est.mean},
             {"stderr", est.std_error},
             {"closed_form", mgf_closed_form(lam, wf.pstar, spec, n)},
             {"ks_distance", cdf.ks_distance_normal()},
             {"exceedance", cdf.exceedance(phi_inv(sim_eps + sim_tau))}};
      out << j.dump() << "\n";
      return 0;
    }
    if (*ver_cmd) {
      ver.spec = ver_args.spec();
      ver.seed = RngSeed{ver_seed, 0};
      ver.threads = resolve_threads(threads);
      if (ver.trials == 0) throw std::invalid_argument("trials must be positive");
      const auto& names = ver_checks.empty() ? verify_check_names() : ver_checks;
      Json checks = Json::array();
      bool all = true;
      for (const auto& name : names) {
        const auto result = run_check(name, ver);
        all = all && result.pass;
        Json row{{"check", result.name}, {"pass", result.pass}};
        row["details"] = result.details;
        checks.push_back(row);
      }
      out << Json{{"pass", all}, {"checks", checks}}.dump() << "\n";
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fblock
