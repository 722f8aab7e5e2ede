#include <doctest.h>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <limits>

#include "fblock/bht.hpp"
#include "fblock/rng.hpp"

using namespace fblock;

namespace {

// min q.phi over phi in [0,1]^m with p.phi >= delta. A linear program with one
// constraint has an optimal vertex with at most one fractional coordinate, so
// trying every (accept set, fractional outcome) pair finds the optimum.
double brute_force_beta(double delta, const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t m = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double pa = 0.0, qa = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1u) {
        pa += p[i];
        qa += q[i];
      }
    }
    if (pa >= delta - 1e-15) best = std::min(best, qa);
    for (std::size_t j = 0; j < m; ++j) {
      if ((mask >> j & 1u) || p[j] <= 0.0) continue;
      const double theta = (delta - pa) / p[j];
      if (theta >= 0.0 && theta <= 1.0 + 1e-12) best = std::min(best, qa + theta * q[j]);
    }
  }
  return best;
}

std::vector<double> random_pmf(Rng& rng, std::size_t m, double zero_prob) {
  std::vector<double> v(m);
  double sum = 0.0;
  for (auto& x : v) {
    x = rng.uniform() < zero_prob ? 0.0 : -std::log(rng.uniform());
    sum += x;
  }
  if (sum == 0.0) {
    v[rng.below(m)] = 1.0;
    sum = 1.0;
  }
  for (auto& x : v) x /= sum;
  return v;
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({1.2, -0.2}), std::invalid_argument);
  CHECK_NOTHROW(DiscreteDistribution({0.25, 0.75}));
  const DiscreteDistribution p({0.5, 0.5});
  CHECK_THROWS_AS(beta(1.5, p, p), std::domain_error);
  CHECK_THROWS_AS(beta(-0.1, p, p), std::domain_error);
}

TEST_CASE("beta examples") {
  const DiscreteDistribution p({0.2, 0.3, 0.5});
  for (double d : {0.0, 0.1, 0.37, 1.0}) CHECK(beta(d, p, p) == doctest::Approx(d).epsilon(1e-14));
  CHECK(beta(0.8, DiscreteDistribution({0.5, 0.5, 0.0}), DiscreteDistribution({0.0, 0.0, 1.0})) == 0.0);
  CHECK(beta(0.5, DiscreteDistribution({0.5, 0.5}), DiscreteDistribution({0.9, 0.1})) ==
        doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("beta matches the brute-force oracle") {
  Rng rng({41, 0});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(12);
    const auto p = random_pmf(rng, m, 0.15);
    const auto q = random_pmf(rng, m, 0.15);
    const double delta = i % 10 == 0 ? double(i % 20 == 0) : rng.uniform();
    const double got = beta(delta, DiscreteDistribution(p), DiscreteDistribution(q));
    CHECK(std::abs(got - brute_force_beta(delta, p, q)) <= 1e-12);
  }
}

TEST_CASE("beta is nondecreasing and convex in delta") {
  Rng rng({42, 0});
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 2 + rng.below(8);
    const DiscreteDistribution p(random_pmf(rng, m, 0.0)), q(random_pmf(rng, m, 0.0));
    CHECK(beta(0.0, p, q) == 0.0);
    CHECK(beta(1.0, p, q) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 0.0, prev_slope = 0.0;
    const int steps = 200;
    for (int k = 1; k <= steps; ++k) {
      const double b = beta(double(k) / steps, p, q);
      CHECK(b >= prev - 1e-15);
      const double slope = (b - prev) * steps;
      CHECK(slope >= prev_slope - 1e-9);
      prev_slope = slope;
      prev = b;
    }
  }
}

TEST_CASE("lower bound and likelihood-ratio tail") {
  CHECK(beta_lower_bound(0.3, 2.0, 0.5) == 0.0);
  CHECK(beta_lower_bound(0.999, std::exp(10.0), 0.5) == doctest::Approx(0.499 * std::exp(-10.0)).epsilon(1e-14));
  CHECK(beta_lower_bound(0.999, std::exp(10.0), 0.5) == doctest::Approx(2.266e-5).epsilon(1e-3));

  const DiscreteDistribution p({0.5, 0.3, 0.2, 0.0}), q({0.1, 0.3, 0.0, 0.6});
  CHECK(lr_tail(p, q, 1.0) == doctest::Approx(1.0));
  CHECK(lr_tail(p, q, 2.0) == doctest::Approx(0.7));
  CHECK(lr_tail(p, q, 1e9) == doctest::Approx(0.2));

  Rng rng({43, 0});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(12);
    const auto pv = random_pmf(rng, m, 0.1), qv = random_pmf(rng, m, 0.1);
    const DiscreteDistribution pd(pv), qd(qv);
    const double xi = std::exp(4.0 * rng.uniform() - 2.0);
    const double delta = rng.uniform();
    double tail = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (pv[j] > 0.0 && (qv[j] == 0.0 || pv[j] / qv[j] >= xi)) tail += pv[j];
    }
    CHECK(lr_tail(pd, qd, xi) == doctest::Approx(tail).epsilon(1e-14));
    CHECK(beta(delta, pd, qd) >= beta_lower_bound(delta, xi, tail) - 1e-15);
  }
}

TEST_CASE("data processing") {
  const DiscreteDistribution p({0.1, 0.2, 0.3, 0.4}), q({0.4, 0.3, 0.2, 0.1});
  const std::vector<std::size_t> identity{0, 1, 2, 3}, constant{0, 0, 0, 0};
  for (double d : {0.2, 0.5, 0.9}) {
    CHECK(beta(d, pushforward(p, identity, 4), pushforward(q, identity, 4)) == doctest::Approx(beta(d, p, q)));
    CHECK(beta(d, pushforward(p, constant, 1), pushforward(q, constant, 1)) == doctest::Approx(d));
    CHECK(dpi_check(p, q, identity, 4, d));
    CHECK(dpi_check(p, q, constant, 1, d));
  }
  const auto merged = pushforward(p, std::vector<std::size_t>{1, 0, 1, 0}, 2);
  CHECK(merged[0] == doctest::Approx(0.6));
  CHECK(merged[1] == doctest::Approx(0.4));

  Rng rng({44, 0});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(12);
    const std::size_t k = 1 + rng.below(m);
    const DiscreteDistribution pd(random_pmf(rng, m, 0.1)), qd(random_pmf(rng, m, 0.1));
    std::vector<std::size_t> g(m);
    for (auto& v : g) v = rng.below(k);
    CHECK(dpi_check(pd, qd, g, k, rng.uniform()));
  }
}

TEST_CASE("meta-converse size bound") {
  CHECK(metaconverse_size_bound(1.0) == 1.0);
  CHECK(metaconverse_size_bound(1e-3) == doctest::Approx(1000.0));
  CHECK(std::isinf(metaconverse_size_bound(0.0)));
}

TEST_CASE("meta-converse on a 4-message repetition code over a BSC") {
  // Two message bits, each repeated three times; majority decoding per bit.
  for (double flip : {0.01, 0.1, 0.3}) {
    const std::size_t M = 4, outputs = 64;
    std::vector<double> w(M * outputs);  // W(v | x(u))
    for (std::size_t u = 0; u < M; ++u) {
      std::uint32_t x = 0;
      for (int b = 0; b < 2; ++b) x |= (u >> b & 1u ? 7u : 0u) << (3 * b);
      for (std::uint32_t v = 0; v < outputs; ++v) {
        const int d = std::popcount(x ^ v);
        w[u * outputs + v] = std::pow(flip, d) * std::pow(1 - flip, 6 - d);
      }
    }
    auto decode = [](std::uint32_t v) {
      std::size_t u = 0;
      for (int b = 0; b < 2; ++b) u |= (std::popcount((v >> (3 * b)) & 7u) >= 2 ? 1u : 0u) << b;
      return u;
    };
    double correct = 0.0;
    for (std::size_t u = 0; u < M; ++u) {
      for (std::uint32_t v = 0; v < outputs; ++v) correct += decode(v) == u ? w[u * outputs + v] / M : 0.0;
    }
    const double alpha = 1.0 - correct;

    // Raw outputs: p_{U,V} against p_U x q_V, q_V the output marginal.
    std::vector<double> joint(M * outputs), prod(M * outputs), qv(outputs, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      joint[i] = w[i] / M;
      qv[i % outputs] += joint[i];
    }
    for (std::size_t i = 0; i < joint.size(); ++i) prod[i] = qv[i % outputs] / M;
    const double b_raw = beta(1.0 - alpha, DiscreteDistribution(joint), DiscreteDistribution(prod));
    CHECK(metaconverse_size_bound(b_raw) >= M * (1 - 1e-12));

    // Decoded outputs: the 4 x 4 joint law of (U, U_hat).
    std::vector<double> j4(M * M, 0.0), q4(M, 0.0), p4(M * M);
    for (std::size_t u = 0; u < M; ++u) {
      for (std::uint32_t v = 0; v < outputs; ++v) j4[u * M + decode(v)] += w[u * outputs + v] / M;
    }
    for (std::size_t i = 0; i < j4.size(); ++i) q4[i % M] += j4[i];
    for (std::size_t i = 0; i < j4.size(); ++i) p4[i] = q4[i % M] / M;
    const double b4 = beta(1.0 - alpha, DiscreteDistribution(j4), DiscreteDistribution(p4));
    CHECK(metaconverse_size_bound(b4) >= M * (1 - 1e-12));
    CHECK(b4 >= b_raw - 1e-12);
  }
}
