#include "fblock/power_type.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fblock {

namespace {

// Shared by the enumerating and the counting paths so both classify every
// lattice point identically, down to the last ulp.
bool is_near(std::span<const std::uint32_t> a, double scale, const PowerAllocation& pstar, double radius) {
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double d = scale * a[l] - pstar[l];
    sum += d * d;
  }
  return std::sqrt(sum) <= radius;
}

double near_radius(std::uint32_t n, double exponent) { return std::pow(static_cast<double>(n), -exponent); }

}  // namespace

PowerType power_type(const BlockMatrix& x) {
  if (x.cols() == 0) throw std::invalid_argument("power_type: block length must be positive");
  std::vector<double> t(x.rows());
  for (std::size_t l = 0; l < x.rows(); ++l) t[l] = x.row_energy(l) / static_cast<double>(x.cols());
  return PowerType(std::move(t));
}

bool in_bounding_box(const PowerType& t, const PowerAllocation& s, double delta) {
  if (t.size() != s.size()) throw std::invalid_argument("in_bounding_box: length mismatch");
  if (delta < 0.0) throw std::invalid_argument("in_bounding_box: delta must be nonnegative");
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (t[l] < s[l] - delta || t[l] > s[l] + delta) return false;
  }
  return true;
}

std::uint64_t composition_count(std::uint64_t n, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("composition_count: parts must be positive");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  // result = C(n+i, i) after step i; divide out the gcd first so the
  // intermediate product never overflows when the final value fits.
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i < parts; ++i) {
    if (n > kMax - i) throw std::overflow_error("composition count does not fit in 64 bits");
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t f = (n + i) / (i / g);
    if (r > kMax / f) throw std::overflow_error("composition count does not fit in 64 bits");
    result = r * f;
  }
  return result;
}

double log_composition_count(double n, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("log_composition_count: parts must be positive");
  const double L = static_cast<double>(parts);
  return std::lgamma(n + L) - std::lgamma(n + 1.0) - std::lgamma(L);
}

CompositionIterator::CompositionIterator(std::uint32_t n, std::size_t parts) : counts_(parts, 0) {
  if (parts == 0) throw std::invalid_argument("CompositionIterator: parts must be positive");
  counts_.back() = n;
}

bool CompositionIterator::next() {
  std::size_t m = counts_.size();
  while (m > 0 && counts_[m - 1] == 0) --m;
  if (m <= 1) return false;  // all mass on the first part (or n = 0)
  --m;
  const std::uint32_t rest = counts_[m] - 1;
  counts_[m] = 0;
  ++counts_[m - 1];
  counts_.back() = rest;
  return true;
}

void for_each_power_type(std::uint32_t n, const ChannelSpec& spec,
                         const std::function<void(const PowerAllocation&)>& visit) {
  if (n == 0) throw std::invalid_argument("power types need a positive block length");
  const double scale = spec.power() / n;
  CompositionIterator it(n, spec.channels());
  std::vector<double> s(spec.channels());
  do {
    const auto a = it.current();
    for (std::size_t l = 0; l < a.size(); ++l) s[l] = scale * a[l];
    visit(PowerAllocation(s));
  } while (it.next());
}

PowerTypeSet PowerTypeSet::enumerate(std::uint32_t n, const ChannelSpec& spec, std::uint64_t max_entries) {
  if (n == 0) throw std::invalid_argument("power types need a positive block length");
  const std::uint64_t count = composition_count(n, spec.channels());
  if (count > max_entries) {
    throw std::length_error("power-type set has " + std::to_string(count) +
                            " entries, above the enumeration limit; use the iterator form");
  }
  PowerTypeSet set(n, spec.channels(), spec.power());
  set.counts_.reserve(count * spec.channels());
  CompositionIterator it(n, spec.channels());
  do {
    const auto a = it.current();
    set.counts_.insert(set.counts_.end(), a.begin(), a.end());
  } while (it.next());
  return set;
}

PowerAllocation PowerTypeSet::allocation(std::size_t i) const {
  const auto a = counts(i);
  std::vector<double> s(a.size());
  for (std::size_t l = 0; l < a.size(); ++l) s[l] = power_ / n_ * a[l];
  return PowerAllocation(std::move(s));
}

PowerTypeSet PowerTypeSet::filter(const std::function<bool(const PowerAllocation&)>& keep) const {
  return filter_counts([&](std::span<const std::uint32_t> a) {
    std::vector<double> s(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) s[l] = power_ / n_ * a[l];
    return keep(PowerAllocation(std::move(s)));
  });
}

PowerTypeSet PowerTypeSet::filter_counts(
    const std::function<bool(std::span<const std::uint32_t>)>& keep) const {
  PowerTypeSet out(n_, channels_, power_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (keep(counts(i))) {
      const auto a = counts(i);
      out.counts_.insert(out.counts_.end(), a.begin(), a.end());
    }
  }
  return out;
}

namespace {

PowerTypeSet split(const PowerTypeSet& set, const PowerAllocation& pstar, double exponent, bool want_near) {
  if (pstar.size() != set.channels()) throw std::invalid_argument("pstar length does not match the power-type set");
  const double radius = near_radius(set.block_length(), exponent);
  const double scale = set.power() / set.block_length();
  return set.filter_counts(
      [&](std::span<const std::uint32_t> a) { return is_near(a, scale, pstar, radius) == want_near; });
}

}  // namespace

PowerTypeSet near_optimal_subset(const PowerTypeSet& set, const PowerAllocation& pstar, double exponent) {
  return split(set, pstar, exponent, true);
}

PowerTypeSet far_subset(const PowerTypeSet& set, const PowerAllocation& pstar, double exponent) {
  return split(set, pstar, exponent, false);
}

std::uint64_t count_near_optimal(std::uint32_t n, const ChannelSpec& spec, const PowerAllocation& pstar,
                                 double exponent) {
  if (n == 0) throw std::invalid_argument("power types need a positive block length");
  const std::size_t L = spec.channels();
  if (pstar.size() != L) throw std::invalid_argument("pstar length does not match the channel");
  const double radius = near_radius(n, exponent);
  const double scale = spec.power() / n;
  std::vector<std::uint32_t> a(L, 0);

  if (L == 1) {
    a[0] = n;
    return is_near(a, scale, pstar, radius) ? 1 : 0;
  }

  // Count a[L-2] in [0, m] (a[L-1] = m - a[L-2]) that pass: locate the
  // interval from the real roots, then settle its ends with the exact test.
  auto count_tail = [&](std::uint32_t m, double partial) -> std::uint64_t {
    const double p1 = pstar[L - 2];
    const double p2 = pstar[L - 1];
    auto pass = [&](std::int64_t j) {
      a[L - 2] = static_cast<std::uint32_t>(j);
      a[L - 1] = m - a[L - 2];
      return is_near(a, scale, pstar, radius);
    };
    // ||.||^2 restricted to the tail is a convex quadratic in x = scale*j.
    const double budget = radius * radius - partial;
    if (budget < -1e-12 * radius * radius) return 0;
    const double total = scale * m;
    const double centre = 0.5 * (total + p1 - p2);  // minimiser in x
    const double at_centre = (centre - p1) * (centre - p1) + (total - centre - p2) * (total - centre - p2);
    const double half = std::sqrt(std::max(0.0, (std::max(budget, 0.0) - at_centre) / 2.0));
    const double lo_x = (centre - half) / scale;
    const double hi_x = (centre + half) / scale;
    const auto M = static_cast<std::int64_t>(m);
    std::int64_t lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(lo_x)), 0, M);
    std::int64_t hi = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(hi_x)), 0, M);
    if (lo > hi) {
      // Possibly a narrow interval missed by rounding: probe the nearest point.
      const auto j = std::clamp<std::int64_t>(std::llround(centre / scale), 0, M);
      lo = hi = j;
    }
    while (lo > 0 && pass(lo - 1)) --lo;
    while (hi < M && pass(hi + 1)) ++hi;
    while (lo <= hi && !pass(lo)) ++lo;
    while (hi >= lo && !pass(hi)) --hi;
    return lo <= hi ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
  };

  std::uint64_t total = 0;
  // Depth-first over the leading L-2 coordinates, pruning on partial distance.
  std::function<void(std::size_t, std::uint32_t, double)> walk = [&](std::size_t l, std::uint32_t left,
                                                                      double partial) {
    if (l + 2 == L) {
      total += count_tail(left, partial);
      return;
    }
    // Only coordinates within the remaining radius of pstar[l] can pass.
    const double span = std::sqrt(std::max(0.0, radius * radius * (1.0 + 1e-9) - partial));
    const double first = std::floor((pstar[l] - span) / scale);
    const double last = std::ceil((pstar[l] + span) / scale);
    if (last < 0.0) return;
    const auto v_lo = static_cast<std::uint32_t>(std::max(0.0, first));
    const auto v_hi = static_cast<std::uint32_t>(std::min<double>(left, last));
    for (std::uint32_t v = v_lo; v <= v_hi && v >= v_lo; ++v) {
      const double d = scale * v - pstar[l];
      a[l] = v;
      walk(l + 1, left - v, partial + d * d);
    }
    a[l] = 0;
  };
  walk(0, n, 0.0);
  return total;
}

std::optional<std::vector<std::uint32_t>> lattice_counts(const PowerType& t, std::uint32_t n, double power,
                                                         double tolerance) {
  std::vector<std::uint32_t> a(t.size());
  std::uint64_t sum = 0;
  for (std::size_t l = 0; l < t.size(); ++l) {
    const double v = t[l] * n / power;
    const double r = std::round(v);
    if (std::abs(v - r) > tolerance * std::max(1.0, static_cast<double>(n))) return std::nullopt;
    a[l] = static_cast<std::uint32_t>(r);
    sum += a[l];
  }
  if (sum != n) return std::nullopt;
  return a;
}

}  // namespace fblock
