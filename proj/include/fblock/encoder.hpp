#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "fblock/channel.hpp"
#include "fblock/rng.hpp"

namespace fblock {

/// A feedback encoder as a per-message state machine: begin(w) resets it for
/// message w, then emit() is called once per channel use with the previous
/// output column (empty on the first use) and writes the next input column.
///
/// Implementations must be deterministic in (w, outputs so far) and must keep
/// every codeword within the block power n P.
class FeedbackEncoder {
 public:
  virtual ~FeedbackEncoder() = default;

  virtual std::size_t channels() const = 0;
  virtual std::size_t block_length() const = 0;
  virtual std::uint64_t message_count() const = 0;

  virtual void begin(std::uint64_t message) = 0;
  virtual void emit(std::span<const double> previous_output, std::span<double> x) = 0;

  /// Fresh copy with the same configuration; state after clone() is unspecified
  /// until begin() is called.
  virtual std::unique_ptr<FeedbackEncoder> clone() const = 0;
};

struct Transmission {
  BlockMatrix x;
  BlockMatrix z;
  BlockMatrix y;
};

/// Runs one block of the closed loop: noise columns are drawn from Rng(seed)
/// in time order, and the encoder sees y_{k-1} before producing x_k.
Transmission transmit(FeedbackEncoder& enc, std::uint64_t message, const ChannelSpec& spec, RngSeed seed);

/// The codeword the encoder would produce for `message` given the output
/// sequence y (only the first block_length() columns are used).
BlockMatrix replay_codeword(FeedbackEncoder& enc, std::uint64_t message, const BlockMatrix& y);

/// Maximum-likelihood message estimate: argmax_w sum_k log q(y_k | x_k(w, y^{k-1})).
/// Columns of y beyond enc.block_length() are ignored. Ties go to the lowest index.
std::uint64_t decode_ml(FeedbackEncoder& enc, const BlockMatrix& y, const ChannelSpec& spec);

}  // namespace fblock
