#include "fblock/code_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fblock {

double default_gamma(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_gamma: block length must be positive");
  return std::pow(static_cast<double>(n), -1.0 / 6.0);
}

double clamped_sqrt(double residual, double scale) {
  if (residual >= 0.0) return std::sqrt(residual);
  if (residual >= -1e-9 * scale) return 0.0;
  throw std::logic_error("negative power residual " + std::to_string(residual));
}

ModifiedEncoder::ModifiedEncoder(std::unique_ptr<FeedbackEncoder> inner, const ChannelSpec& spec, double gamma,
                                 PowerAllocation s)
    : inner_(std::move(inner)), power_(spec.power()), gamma_(gamma), s_(std::move(s)) {
  if (!inner_) throw std::invalid_argument("modify_code: null encoder");
  if (inner_->channels() != spec.channels() || s_.size() != spec.channels()) {
    throw std::invalid_argument("modify_code: size mismatch");
  }
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) throw std::invalid_argument("modify_code: gamma must be >= 0");
  if (std::abs(s_.total() - power_) > 1e-12 * std::max(1.0, power_)) {
    throw std::invalid_argument("modify_code: allocation must sum to the power budget");
  }
  raw_.resize(spec.channels());
  energy_.resize(spec.channels());
}

ModifiedEncoder::ModifiedEncoder(const ModifiedEncoder& other)
    : FeedbackEncoder(other), inner_(other.inner_->clone()), power_(other.power_), gamma_(other.gamma_),
      s_(other.s_), raw_(other.raw_), energy_(other.energy_), k_(other.k_) {}

void ModifiedEncoder::begin(std::uint64_t message) {
  inner_->begin(message);
  std::fill(energy_.begin(), energy_.end(), 0.0);
  k_ = 0;
}

void ModifiedEncoder::emit(std::span<const double> previous_output, std::span<double> x) {
  const std::size_t n = block_length();
  const std::size_t L = channels();
  if (k_ >= n) throw std::logic_error("encoder called past its block length");
  inner_->emit(previous_output, raw_);
  const double nn = static_cast<double>(n);
  const double tol = kPowerTolerance * nn * power_;

  if (k_ + 1 < n) {
    for (std::size_t l = 0; l < L; ++l) {
      const double f = raw_[l];
      x[l] = energy_[l] + f * f <= nn * (s_[l] + gamma_) + tol ? f : 0.0;
      energy_[l] += x[l] * x[l];
    }
  } else {
    const double Lg = static_cast<double>(L) * gamma_;
    for (std::size_t l = 0; l + 1 < L; ++l) {
      const double f = raw_[l];
      const double total = energy_[l] + f * f;
      const double lo = nn * (s_[l] - Lg);
      const double hi = nn * (s_[l] + gamma_);
      if (total < lo - tol) {
        x[l] = clamped_sqrt(lo - energy_[l], nn * power_);
      } else if (total > hi + tol) {
        x[l] = clamped_sqrt(hi - energy_[l], nn * power_);
      } else {
        x[l] = f;
      }
      energy_[l] += x[l] * x[l];
    }
    const double rest = std::accumulate(energy_.begin(), energy_.end(), 0.0);
    const double f = raw_[L - 1];
    const double target = nn * power_;
    x[L - 1] = std::abs(rest + f * f - target) <= tol ? f : clamped_sqrt(target - rest, target);
    energy_[L - 1] += x[L - 1] * x[L - 1];
  }
  ++k_;
}

std::unique_ptr<ModifiedEncoder> modify_code(const FeedbackEncoder& enc, const ChannelSpec& spec, double gamma,
                                             const PowerAllocation& s) {
  return std::make_unique<ModifiedEncoder>(enc.clone(), spec, gamma, s);
}

DiscretizedEncoder::DiscretizedEncoder(std::unique_ptr<FeedbackEncoder> inner, const ChannelSpec& spec)
    : inner_(std::move(inner)), power_(spec.power()) {
  if (!inner_) throw std::invalid_argument("discretize_code: null encoder");
  if (inner_->channels() != spec.channels()) throw std::invalid_argument("discretize_code: size mismatch");
  energy_.resize(spec.channels());
}

DiscretizedEncoder::DiscretizedEncoder(const DiscretizedEncoder& other)
    : FeedbackEncoder(other), inner_(other.inner_->clone()), power_(other.power_), energy_(other.energy_),
      k_(other.k_) {}

void DiscretizedEncoder::begin(std::uint64_t message) {
  inner_->begin(message);
  std::fill(energy_.begin(), energy_.end(), 0.0);
  k_ = 0;
}

void DiscretizedEncoder::emit(std::span<const double> previous_output, std::span<double> x) {
  const std::size_t n_bar = inner_->block_length();
  const std::size_t L = channels();
  const double scale = static_cast<double>(block_length()) * power_;
  if (k_ >= block_length()) throw std::logic_error("encoder called past its block length");
  if (k_ < n_bar) {
    inner_->emit(previous_output, x);
    for (std::size_t l = 0; l < L; ++l) energy_[l] += x[l] * x[l];
  } else {
    std::fill(x.begin(), x.end(), 0.0);
    const std::size_t j = k_ - n_bar;
    if (j < L) {
      // Round up to the next multiple of P; energies already on a multiple
      // (up to rounding) stay there instead of jumping a whole P.
      const double units = energy_[j] / power_;
      const double nearest = std::round(units);
      if (std::abs(units - nearest) <= 1e-9 * std::max(1.0, units)) {
        x[j] = 0.0;
        energy_[j] = power_ * nearest;
      } else {
        const double m = std::ceil(units);
        x[j] = clamped_sqrt(power_ * m - energy_[j], scale);
        energy_[j] = power_ * m;
      }
    } else {
      const double total = std::accumulate(energy_.begin(), energy_.end(), 0.0);
      x[L - 1] = clamped_sqrt(scale - total, scale);
      energy_[L - 1] += scale - total;
    }
  }
  ++k_;
}

std::unique_ptr<DiscretizedEncoder> discretize_code(const FeedbackEncoder& enc, const ChannelSpec& spec) {
  return std::make_unique<DiscretizedEncoder>(enc.clone(), spec);
}

}  // namespace fblock
