#pragma once

#include <memory>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/encoder.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// Box half-width used for the modified code when none is given: n^(-1/6).
double default_gamma(std::size_t n);

/// Relative slack on every power comparison inside the transforms. Keeps
/// pass-through bit-exact for codewords that sit on a boundary up to rounding.
inline constexpr double kPowerTolerance = 1e-11;

/// The (gamma, s)-modified version of an encoder.
///
/// Channel uses are processed in the order (l=1,k=1), ..., (L,1), (1,2), ...:
///  * k < n: a symbol passes unless it would push channel l's cumulative
///    energy above n(s_l + gamma), in which case it is replaced by 0;
///  * k = n, l < L: the final symbol passes if the channel total lands in
///    [n(s_l - L gamma), n(s_l + gamma)], is raised to reach the lower edge
///    when below it, and lowered to hit the upper edge when above it;
///  * k = n, l = L: the symbol is chosen so the grand total is exactly nP.
/// The result has per-channel totals in [n(s_l - L gamma), n(s_l + L^2 gamma)]
/// on every path.
class ModifiedEncoder final : public FeedbackEncoder {
 public:
  ModifiedEncoder(std::unique_ptr<FeedbackEncoder> inner, const ChannelSpec& spec, double gamma, PowerAllocation s);
  ModifiedEncoder(const ModifiedEncoder& other);

  std::size_t channels() const override { return inner_->channels(); }
  std::size_t block_length() const override { return inner_->block_length(); }
  std::uint64_t message_count() const override { return inner_->message_count(); }
  void begin(std::uint64_t message) override;
  void emit(std::span<const double> previous_output, std::span<double> x) override;
  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<ModifiedEncoder>(*this); }

  double gamma() const { return gamma_; }
  const PowerAllocation& center() const { return s_; }
  const FeedbackEncoder& inner() const { return *inner_; }

 private:
  std::unique_ptr<FeedbackEncoder> inner_;
  double power_;
  double gamma_;
  PowerAllocation s_;
  std::vector<double> raw_;
  std::vector<double> energy_;
  std::size_t k_ = 0;
};

/// Throws std::invalid_argument unless |sum s - P| <= 1e-12 max(1, P) and gamma >= 0.
std::unique_ptr<ModifiedEncoder> modify_code(const FeedbackEncoder& enc, const ChannelSpec& spec, double gamma,
                                             const PowerAllocation& s);

/// Extends an encoder over n_bar uses to n_bar + L + 1 uses so that every
/// per-channel energy is an integer multiple of P and the total is exactly nP.
///
/// At use n_bar + l, channel l sends sqrt(P ceil(A_l / P) - A_l) where A_l is
/// its energy so far; at use n_bar + L + 1, channel L sends
/// sqrt(nP - total). All other entries of the appended columns are 0, and the
/// appended uses carry no information.
class DiscretizedEncoder final : public FeedbackEncoder {
 public:
  DiscretizedEncoder(std::unique_ptr<FeedbackEncoder> inner, const ChannelSpec& spec);
  DiscretizedEncoder(const DiscretizedEncoder& other);

  std::size_t channels() const override { return inner_->channels(); }
  std::size_t block_length() const override { return inner_->block_length() + inner_->channels() + 1; }
  std::uint64_t message_count() const override { return inner_->message_count(); }
  void begin(std::uint64_t message) override;
  void emit(std::span<const double> previous_output, std::span<double> x) override;
  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<DiscretizedEncoder>(*this); }

  /// The wrapped encoder; decoders work with it on the first n_bar columns.
  FeedbackEncoder& inner() { return *inner_; }

 private:
  std::unique_ptr<FeedbackEncoder> inner_;
  double power_;
  std::vector<double> energy_;
  std::size_t k_ = 0;
};

std::unique_ptr<DiscretizedEncoder> discretize_code(const FeedbackEncoder& enc, const ChannelSpec& spec);

/// sqrt(max(residual, 0)); negative residuals beyond -1e-9 * scale are a
/// logic error and throw.
double clamped_sqrt(double residual, double scale);

}  // namespace fblock
