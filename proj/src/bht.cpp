#include "fblock/bht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fblock {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("distribution must have at least one outcome");
  double sum = 0.0;
  for (double v : probs_) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("probabilities must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
}

double beta(double delta, const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("delta must lie in [0, 1]");
  if (p.size() != q.size()) throw std::invalid_argument("beta: alphabet size mismatch");

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) order.push_back(i);  // p = 0 outcomes never help reach delta
  }
  // p_i/q_i > p_j/q_j  <=>  p_i q_j > p_j q_i, which also ranks q = 0 first.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] * q[j] > p[j] * q[i]; });

  double mass = 0.0;
  double type2 = 0.0;
  for (std::size_t i : order) {
    const double need = delta - mass;
    if (need <= 0.0) break;
    if (p[i] <= need) {
      mass += p[i];
      type2 += q[i];
    } else {
      type2 += q[i] * (need / p[i]);
      mass = delta;
    }
  }
  return std::min(type2, 1.0);
}

double beta_lower_bound(double delta, double xi, double tail) {
  if (!(xi > 0.0)) throw std::invalid_argument("beta_lower_bound: xi must be positive");
  return std::max(0.0, (delta - tail) / xi);
}

double lr_tail(const DiscreteDistribution& p, const DiscreteDistribution& q, double xi) {
  if (p.size() != q.size()) throw std::invalid_argument("lr_tail: alphabet size mismatch");
  double tail = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && p[i] >= xi * q[i]) tail += p[i];
  }
  return tail;
}

DiscreteDistribution pushforward(const DiscreteDistribution& p, std::span<const std::size_t> mapping,
                                 std::size_t out_size) {
  if (mapping.size() != p.size()) throw std::invalid_argument("pushforward: mapping must cover the alphabet");
  std::vector<double> out(out_size, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (mapping[i] >= out_size) throw std::invalid_argument("pushforward: mapping target out of range");
    out[mapping[i]] += p[i];
  }
  // Re-normalize away the rounding of the merge so the invariant holds exactly.
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= sum;
  return DiscreteDistribution(std::move(out));
}

bool dpi_check(const DiscreteDistribution& p, const DiscreteDistribution& q, std::span<const std::size_t> mapping,
               std::size_t out_size, double delta) {
  const double fine = beta(delta, p, q);
  const double coarse = beta(delta, pushforward(p, mapping, out_size), pushforward(q, mapping, out_size));
  return fine <= coarse + 1e-12;
}

double metaconverse_size_bound(double beta_value) {
  if (!(beta_value >= 0.0)) throw std::invalid_argument("metaconverse_size_bound: beta must be nonnegative");
  if (beta_value == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / beta_value;
}

}  // namespace fblock
