#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fblock {

/// Probability vector on {0, ..., size-1}; entries are nonnegative and sum
/// to 1 within 1e-12.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Minimum type-II error q(accept) over randomized tests with p(accept) >= delta.
///
/// Outcomes are taken in decreasing order of p/q (q = 0 < p first, index
/// breaks ties) and accepted greedily, randomizing on the outcome that
/// crosses delta. Outcomes with p = 0 are never needed. Throws
/// std::domain_error for delta outside [0, 1].
double beta(double delta, const DiscreteDistribution& p, const DiscreteDistribution& q);

/// max(0, (delta - tail) / xi), where tail = P_p{p/q >= xi}.
double beta_lower_bound(double delta, double xi, double tail);

/// P_p{p(x)/q(x) >= xi}, with p/q = +inf where q = 0 < p.
double lr_tail(const DiscreteDistribution& p, const DiscreteDistribution& q, double xi);

/// Distribution of g(X) for X ~ p, where mapping[i] = g(i) < out_size.
DiscreteDistribution pushforward(const DiscreteDistribution& p, std::span<const std::size_t> mapping,
                                 std::size_t out_size);

/// beta(delta, p, q) <= beta(delta, p o g^-1, q o g^-1) (up to 1e-12).
bool dpi_check(const DiscreteDistribution& p, const DiscreteDistribution& q, std::span<const std::size_t> mapping,
               std::size_t out_size, double delta);

/// Code-size bound 1/beta; +infinity when beta = 0.
double metaconverse_size_bound(double beta_value);

}  // namespace fblock
