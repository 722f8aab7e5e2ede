#include "fblock/encoder.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace fblock {

Transmission transmit(FeedbackEncoder& enc, std::uint64_t message, const ChannelSpec& spec, RngSeed seed) {
  if (enc.channels() != spec.channels()) throw std::invalid_argument("transmit: encoder/channel size mismatch");
  if (message >= enc.message_count()) throw std::invalid_argument("transmit: message out of range");
  const std::size_t L = spec.channels();
  const std::size_t n = enc.block_length();
  Transmission t{BlockMatrix(L, n), BlockMatrix(L, n), BlockMatrix(L, n)};
  Rng rng(seed);
  enc.begin(message);
  for (std::size_t k = 0; k < n; ++k) {
    const std::span<const double> prev = k == 0 ? std::span<const double>{} : t.y.column(k - 1);
    enc.emit(prev, t.x.column(k));
    draw_noise_column(spec, rng, t.z.column(k));
    for (std::size_t l = 0; l < L; ++l) t.y(l, k) = t.x(l, k) + t.z(l, k);
  }
  return t;
}

BlockMatrix replay_codeword(FeedbackEncoder& enc, std::uint64_t message, const BlockMatrix& y) {
  const std::size_t n = enc.block_length();
  if (y.rows() != enc.channels() || y.cols() < n) throw std::invalid_argument("replay_codeword: output too short");
  BlockMatrix x(enc.channels(), n);
  enc.begin(message);
  for (std::size_t k = 0; k < n; ++k) {
    const std::span<const double> prev = k == 0 ? std::span<const double>{} : y.column(k - 1);
    enc.emit(prev, x.column(k));
  }
  return x;
}

std::uint64_t decode_ml(FeedbackEncoder& enc, const BlockMatrix& y, const ChannelSpec& spec) {
  std::uint64_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::uint64_t w = 0; w < enc.message_count(); ++w) {
    const BlockMatrix x = replay_codeword(enc, w, y);
    double score = 0.0;
    for (std::size_t k = 0; k < x.cols(); ++k) score += log_channel_density(y.column(k), x.column(k), spec);
    if (score > best_score) {
      best_score = score;
      best = w;
    }
  }
  return best;
}

}  // namespace fblock
