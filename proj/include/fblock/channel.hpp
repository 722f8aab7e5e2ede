#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fblock/rng.hpp"

namespace fblock {

/// L independent AWGN sub-channels with noise variances N_l and a per-use
/// power budget P. All log-densities in this library are in nats.
class ChannelSpec {
 public:
  ChannelSpec(std::vector<double> noise, double power);

  std::size_t channels() const { return noise_.size(); }
  std::span<const double> noise() const { return noise_; }
  double noise(std::size_t l) const { return noise_[l]; }
  double power() const { return power_; }
  double max_noise() const;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;

 private:
  std::vector<double> noise_;
  double power_;
};

/// L x n real matrix; column k is the channel-use-k vector. Stored
/// column-major so a channel use is a contiguous span.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(std::size_t rows, std::size_t cols);

  static BlockMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t l, std::size_t k) { return data_[k * rows_ + l]; }
  double operator()(std::size_t l, std::size_t k) const { return data_[k * rows_ + l]; }

  std::span<double> column(std::size_t k) { return {data_.data() + k * rows_, rows_}; }
  std::span<const double> column(std::size_t k) const { return {data_.data() + k * rows_, rows_}; }

  /// Sum over k of x(l,k)^2.
  double row_energy(std::size_t l) const;

  friend bool operator==(const BlockMatrix&, const BlockMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Draws one channel use of noise, z_l ~ Normal(0, N_l), in channel order.
void draw_noise_column(const ChannelSpec& spec, Rng& rng, std::span<double> z);

/// Z^n with independent entries; draws are taken column by column from
/// Rng(seed), so the same key always yields the same matrix.
BlockMatrix sample_noise(const ChannelSpec& spec, std::size_t n, RngSeed seed);

/// Y = X + Z.
BlockMatrix apply_channel(const BlockMatrix& x, const BlockMatrix& z);

/// log N(value; mean, variance).
double log_normal_density(double value, double mean, double variance);

/// log q(y | x) = sum_l log N(y_l; x_l, N_l).
double log_channel_density(std::span<const double> y, std::span<const double> x, const ChannelSpec& spec);

}  // namespace fblock
