#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fblock/channel.hpp"
#include "fblock/encoder.hpp"
#include "fblock/vectors.hpp"

namespace fblock {

/// Selects and parameterizes a built-in encoder.
///
///   iid-gaussian  message-indexed pseudorandom Gaussian codebook, row l with
///                 variance alloc_l; ignores feedback. Codewords whose energy
///                 exceeds nP are scaled down onto the sphere.
///   sphere        same codebook with each row rescaled to energy n alloc_l
///                 exactly.
///   toy-feedback  per-channel linear feedback: the message is a point on
///                 (-1, 1), and each use sends a scaled copy of the receiver's
///                 current normalized estimation error, spending n alloc_l
///                 per channel exactly.
struct EncoderConfig {
  std::string name = "toy-feedback";
  std::size_t block_length = 64;
  std::uint64_t message_count = 16;
  /// Per-channel power split; the water-filling solution when unset.
  std::optional<PowerAllocation> allocation;
  std::uint64_t codebook_seed = 1;
};

std::unique_ptr<FeedbackEncoder> make_encoder(const EncoderConfig& config, const ChannelSpec& spec);

const std::vector<std::string>& builtin_encoder_names();

}  // namespace fblock
