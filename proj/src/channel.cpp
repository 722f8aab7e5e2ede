#include "fblock/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fblock {

ChannelSpec::ChannelSpec(std::vector<double> noise, double power) : noise_(std::move(noise)), power_(power) {
  if (noise_.empty()) throw std::invalid_argument("at least one sub-channel is required");
  for (double n : noise_) {
    if (!std::isfinite(n) || n <= 0.0) throw std::invalid_argument("noise variances must be positive");
  }
  if (!std::isfinite(power_) || power_ <= 0.0) throw std::invalid_argument("power must be positive");
}

double ChannelSpec::max_noise() const { return *std::max_element(noise_.begin(), noise_.end()); }

BlockMatrix::BlockMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

BlockMatrix BlockMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  BlockMatrix m(rows.size(), rows.front().size());
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (rows[l].size() != m.cols_) throw std::invalid_argument("BlockMatrix::from_rows: ragged rows");
    for (std::size_t k = 0; k < m.cols_; ++k) m(l, k) = rows[l][k];
  }
  return m;
}

double BlockMatrix::row_energy(std::size_t l) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < cols_; ++k) sum += (*this)(l, k) * (*this)(l, k);
  return sum;
}

void draw_noise_column(const ChannelSpec& spec, Rng& rng, std::span<double> z) {
  for (std::size_t l = 0; l < z.size(); ++l) z[l] = std::sqrt(spec.noise(l)) * rng.normal();
}

BlockMatrix sample_noise(const ChannelSpec& spec, std::size_t n, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("sample_noise: block length must be positive");
  BlockMatrix z(spec.channels(), n);
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) draw_noise_column(spec, rng, z.column(k));
  return z;
}

BlockMatrix apply_channel(const BlockMatrix& x, const BlockMatrix& z) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) {
    throw std::invalid_argument("apply_channel: dimension mismatch");
  }
  BlockMatrix y(x.rows(), x.cols());
  for (std::size_t k = 0; k < x.cols(); ++k) {
    for (std::size_t l = 0; l < x.rows(); ++l) y(l, k) = x(l, k) + z(l, k);
  }
  return y;
}

double log_normal_density(double value, double mean, double variance) {
  const double d = value - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

double log_channel_density(std::span<const double> y, std::span<const double> x, const ChannelSpec& spec) {
  if (y.size() != spec.channels() || x.size() != spec.channels()) {
    throw std::invalid_argument("log_channel_density: vectors must have one entry per sub-channel");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) sum += log_normal_density(y[l], x[l], spec.noise(l));
  return sum;
}

}  // namespace fblock
