#include "fblock/builtin_encoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fblock/allocation.hpp"

namespace fblock {

namespace {

class CodebookEncoder final : public FeedbackEncoder {
 public:
  CodebookEncoder(std::vector<double> alloc, std::size_t n, std::uint64_t m, std::uint64_t seed, bool exact_rows,
                  double power)
      : alloc_(std::move(alloc)), n_(n), m_(m), seed_(seed), exact_rows_(exact_rows), power_(power),
        codeword_(alloc_.size(), n) {}

  std::size_t channels() const override { return alloc_.size(); }
  std::size_t block_length() const override { return n_; }
  std::uint64_t message_count() const override { return m_; }

  void begin(std::uint64_t message) override {
    const std::size_t L = alloc_.size();
    Rng rng(RngSeed{seed_, message});
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t l = 0; l < L; ++l) codeword_(l, k) = std::sqrt(alloc_[l]) * rng.normal();
    }
    const double budget = static_cast<double>(n_) * power_;
    if (exact_rows_) {
      for (std::size_t l = 0; l < L; ++l) {
        const double e = codeword_.row_energy(l);
        const double target = static_cast<double>(n_) * alloc_[l];
        const double scale = e > 0.0 ? std::sqrt(target / e) : 0.0;
        for (std::size_t k = 0; k < n_; ++k) codeword_(l, k) *= scale;
      }
    } else {
      double total = 0.0;
      for (std::size_t l = 0; l < L; ++l) total += codeword_.row_energy(l);
      if (total > budget) {
        const double scale = std::sqrt(budget / total);
        for (std::size_t k = 0; k < n_; ++k) {
          for (std::size_t l = 0; l < L; ++l) codeword_(l, k) *= scale;
        }
      }
    }
    k_ = 0;
  }

  void emit(std::span<const double>, std::span<double> x) override {
    if (k_ >= n_) throw std::logic_error("encoder called past its block length");
    const auto col = codeword_.column(k_++);
    std::copy(col.begin(), col.end(), x.begin());
  }

  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<CodebookEncoder>(*this); }

 private:
  std::vector<double> alloc_;
  std::size_t n_;
  std::uint64_t m_;
  std::uint64_t seed_;
  bool exact_rows_;
  double power_;
  BlockMatrix codeword_;
  std::size_t k_ = 0;
};

// Schalkwijk-Kailath flavoured: channel l transmits g * err where err is the
// receiver's normalized MMSE error about the message point, and the gain
// spreads the remaining energy evenly over the remaining uses.
class ToyFeedbackEncoder final : public FeedbackEncoder {
 public:
  ToyFeedbackEncoder(std::vector<double> alloc, std::vector<double> noise, std::size_t n, std::uint64_t m)
      : alloc_(std::move(alloc)), noise_(std::move(noise)), n_(n), m_(m), err_(alloc_.size()),
        budget_(alloc_.size()), gain_(alloc_.size()) {}

  std::size_t channels() const override { return alloc_.size(); }
  std::size_t block_length() const override { return n_; }
  std::uint64_t message_count() const override { return m_; }

  void begin(std::uint64_t message) override {
    const double theta = (2.0 * static_cast<double>(message) + 1.0) / static_cast<double>(m_) - 1.0;
    for (std::size_t l = 0; l < alloc_.size(); ++l) {
      err_[l] = std::sqrt(3.0) * theta;  // unit variance for a uniform message
      budget_[l] = static_cast<double>(n_) * alloc_[l];
      gain_[l] = 0.0;
    }
    k_ = 0;
  }

  void emit(std::span<const double> previous_output, std::span<double> x) override {
    if (k_ >= n_) throw std::logic_error("encoder called past its block length");
    const std::size_t L = alloc_.size();
    if (k_ > 0) {
      for (std::size_t l = 0; l < L; ++l) {
        const double g = gain_[l];
        const double c = g / (g * g + noise_[l]);
        err_[l] = (err_[l] - c * previous_output[l]) / std::sqrt(noise_[l] / (g * g + noise_[l]));
      }
    }
    const double remaining = static_cast<double>(n_ - k_);
    for (std::size_t l = 0; l < L; ++l) {
      const double cap = std::sqrt(budget_[l]);
      double v;
      if (k_ + 1 == n_) {
        v = err_[l] < 0.0 ? -cap : cap;
      } else {
        v = std::clamp(std::sqrt(budget_[l] / remaining) * err_[l], -cap, cap);
      }
      gain_[l] = std::sqrt(budget_[l] / remaining);
      budget_[l] = std::max(0.0, budget_[l] - v * v);
      x[l] = v;
    }
    ++k_;
  }

  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<ToyFeedbackEncoder>(*this); }

 private:
  std::vector<double> alloc_;
  std::vector<double> noise_;
  std::size_t n_;
  std::uint64_t m_;
  std::vector<double> err_;
  std::vector<double> budget_;
  std::vector<double> gain_;
  std::size_t k_ = 0;
};

}  // namespace

const std::vector<std::string>& builtin_encoder_names() {
  static const std::vector<std::string> names{"iid-gaussian", "sphere", "toy-feedback"};
  return names;
}

std::unique_ptr<FeedbackEncoder> make_encoder(const EncoderConfig& config, const ChannelSpec& spec) {
  if (config.block_length == 0) throw std::invalid_argument("encoder block length must be positive");
  if (config.message_count == 0) throw std::invalid_argument("encoder needs at least one message");
  const PowerAllocation alloc = config.allocation ? *config.allocation : waterfill(spec).pstar;
  if (alloc.size() != spec.channels()) throw std::invalid_argument("allocation length does not match the channel");
  if (alloc.total() > spec.power() * (1.0 + 1e-12)) throw std::invalid_argument("allocation exceeds the power budget");
  std::vector<double> a(alloc.values().begin(), alloc.values().end());
  if (config.name == "iid-gaussian" || config.name == "sphere") {
    return std::make_unique<CodebookEncoder>(std::move(a), config.block_length, config.message_count,
                                             config.codebook_seed, config.name == "sphere", spec.power());
  }
  if (config.name == "toy-feedback") {
    return std::make_unique<ToyFeedbackEncoder>(std::move(a), std::vector<double>(spec.noise().begin(), spec.noise().end()),
                                                config.block_length, config.message_count);
  }
  throw std::invalid_argument("unknown encoder '" + config.name + "'");
}

}  // namespace fblock
