#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/json_io.hpp"
#include "fblock/rng.hpp"

namespace fblock {

struct VerifyOptions {
  ChannelSpec spec{{1.0, 1.2}, 0.5};
  std::size_t n = 64;
  std::size_t trials = 100'000;
  RngSeed seed{7, 0};
  unsigned threads = 1;
  double gamma = -1.0;  ///< < 0: n^(-1/6)
  double eps = 0.1;
  double tau = 0.05;
  /// Empty: every built-in encoder.
  std::vector<std::string> encoders;
  /// Empty: {-0.5, -0.1, 0.1, 0.5, 1/sqrt(n)} restricted to the MGF domain.
  std::vector<double> lambdas;
  std::vector<std::size_t> curtiss_lengths{256, 1024, 4096};
  double ks_threshold = 0.02;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  Json details;
};

const std::vector<std::string>& verify_check_names();

/// Runs one named check; throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name, const VerifyOptions& options);

}  // namespace fblock
