#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fblock/allocation.hpp"
#include "fblock/builtin_encoders.hpp"
#include "fblock/code_transforms.hpp"
#include "fblock/encoder.hpp"
#include "fblock/power_type.hpp"

using namespace fblock;

namespace {

// Replays a fixed codeword regardless of feedback.
class FixedEncoder final : public FeedbackEncoder {
 public:
  explicit FixedEncoder(BlockMatrix x) : x_(std::move(x)) {}
  std::size_t channels() const override { return x_.rows(); }
  std::size_t block_length() const override { return x_.cols(); }
  std::uint64_t message_count() const override { return 1; }
  void begin(std::uint64_t) override { k_ = 0; }
  void emit(std::span<const double>, std::span<double> x) override {
    const auto c = x_.column(k_++);
    std::copy(c.begin(), c.end(), x.begin());
  }
  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<FixedEncoder>(*this); }

 private:
  BlockMatrix x_;
  std::size_t k_ = 0;
};

// Echoes a scaled copy of the last output, dropping symbols the budget cannot pay for.
class EchoEncoder final : public FeedbackEncoder {
 public:
  EchoEncoder(std::size_t L, std::size_t n, double power, double gain) : L_(L), n_(n), power_(power), gain_(gain) {}
  std::size_t channels() const override { return L_; }
  std::size_t block_length() const override { return n_; }
  std::uint64_t message_count() const override { return 4; }
  void begin(std::uint64_t w) override {
    w_ = w;
    used_ = 0.0;
  }
  void emit(std::span<const double> y, std::span<double> x) override {
    for (std::size_t l = 0; l < L_; ++l) {
      double v = y.empty() ? static_cast<double>(w_) - 1.5 : gain_ * y[l];
      const double left = static_cast<double>(n_) * power_ - used_;
      if (v * v > left) v = 0.0;
      used_ += v * v;
      x[l] = v;
    }
  }
  std::unique_ptr<FeedbackEncoder> clone() const override { return std::make_unique<EchoEncoder>(*this); }

 private:
  std::size_t L_, n_;
  double power_, gain_;
  std::uint64_t w_ = 0;
  double used_ = 0.0;
};

double total_energy(const BlockMatrix& x) {
  double e = 0.0;
  for (std::size_t l = 0; l < x.rows(); ++l) e += x.row_energy(l);
  return e;
}

}  // namespace

TEST_CASE("built-in encoders respect the power constraint") {
  const ChannelSpec spec({1.0, 2.0, 0.5}, 2.0);
  for (const auto& name : builtin_encoder_names()) {
    EncoderConfig cfg;
    cfg.name = name;
    cfg.block_length = 40;
    const auto enc = make_encoder(cfg, spec);
    CHECK(enc->channels() == 3);
    CHECK(enc->message_count() == 16);
    for (std::uint64_t t = 0; t < 200; ++t) {
      const auto tx = transmit(*enc, t % 16, spec, {9, t});
      CHECK(total_energy(tx.x) <= 40.0 * 2.0 * (1.0 + 1e-12));
      CHECK(apply_channel(tx.x, tx.z) == tx.y);
    }
  }
  EncoderConfig bad;
  bad.name = "nope";
  CHECK_THROWS_AS(make_encoder(bad, spec), std::invalid_argument);
}

TEST_CASE("sphere and toy-feedback spend exactly n alloc_l per channel") {
  const ChannelSpec spec({1.0, 2.0}, 4.0);
  const auto pstar = waterfill(spec).pstar;
  for (const char* name : {"sphere", "toy-feedback"}) {
    EncoderConfig cfg;
    cfg.name = name;
    cfg.block_length = 33;
    const auto enc = make_encoder(cfg, spec);
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto tx = transmit(*enc, t % 16, spec, {1, t});
      for (std::size_t l = 0; l < 2; ++l) {
        CHECK(tx.x.row_energy(l) == doctest::Approx(33.0 * pstar[l]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("toy-feedback really uses feedback and ML decoding works") {
  const ChannelSpec spec({0.1}, 1.0);
  EncoderConfig cfg;
  cfg.name = "toy-feedback";
  cfg.block_length = 20;
  cfg.message_count = 8;
  const auto enc = make_encoder(cfg, spec);
  const auto a = transmit(*enc, 3, spec, {1, 1});
  const auto b = transmit(*enc, 3, spec, {1, 2});
  CHECK_FALSE(a.x == b.x);
  CHECK(replay_codeword(*enc, 3, a.y) == a.x);

  int correct = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto tx = transmit(*enc, t % 8, spec, {4, t});
    correct += decode_ml(*enc, tx.y, spec) == t % 8 ? 1 : 0;
  }
  CHECK(correct >= 95);
}

TEST_CASE("modify_code preconditions") {
  const ChannelSpec spec({1.0, 2.0}, 3.0);
  FixedEncoder enc(BlockMatrix(2, 4));
  CHECK_THROWS_AS(modify_code(enc, spec, 0.1, PowerAllocation({1.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(modify_code(enc, spec, -0.1, PowerAllocation({1.0, 2.0})), std::invalid_argument);
  CHECK_NOTHROW(modify_code(enc, spec, 0.1, PowerAllocation({1.0, 2.0})));
  CHECK(default_gamma(64) == doctest::Approx(0.5));
}

TEST_CASE("modify_code hand trace: L=1, n=2, gamma=0") {
  const double P = 1.7;
  const ChannelSpec spec({1.0}, P);
  FixedEncoder enc(BlockMatrix::from_rows({{std::sqrt(2 * P), std::sqrt(2 * P)}}));
  auto mod = modify_code(enc, spec, 0.0, PowerAllocation({P}));
  const auto x = replay_codeword(*mod, 0, BlockMatrix(1, 2));
  CHECK(x(0, 0) == std::sqrt(2 * P));
  CHECK(x(0, 1) * x(0, 1) <= 1e-12);
}

TEST_CASE("modify_code clause behaviour") {
  const ChannelSpec spec({1.0, 1.0}, 2.0);
  const PowerAllocation s({1.0, 1.0});
  const double gamma = 0.1;  // n = 4: channel-1 window [4(1-0.2), 4(1+0.1)] = [3.2, 4.4]
  SUBCASE("truncation zeroes a symbol that would overshoot") {
    FixedEncoder enc(BlockMatrix::from_rows({{2.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}}));
    auto mod = modify_code(enc, spec, gamma, s);
    const auto x = replay_codeword(*mod, 0, BlockMatrix(2, 4));
    CHECK(x(0, 0) == 2.0);  // 4 <= 4.4
    CHECK(x(0, 1) == 0.0);  // 5 > 4.4
  }
  SUBCASE("boost at the last use") {
    FixedEncoder enc(BlockMatrix::from_rows({{1.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 0.0}}));
    auto mod = modify_code(enc, spec, gamma, s);
    const auto x = replay_codeword(*mod, 0, BlockMatrix(2, 4));
    CHECK(x(0, 3) == doctest::Approx(std::sqrt(3.2 - 1.0)));
    CHECK(x.row_energy(0) + x.row_energy(1) == doctest::Approx(8.0).epsilon(1e-14));
  }
  SUBCASE("cap at the last use") {
    FixedEncoder enc(BlockMatrix::from_rows({{1.0, 1.0, 1.0, 1.6}, {0.0, 0.0, 0.0, 0.0}}));
    auto mod = modify_code(enc, spec, gamma, s);
    const auto x = replay_codeword(*mod, 0, BlockMatrix(2, 4));
    CHECK(x(0, 3) == doctest::Approx(std::sqrt(4.4 - 3.0)));
    CHECK(x(1, 3) == doctest::Approx(std::sqrt(8.0 - 4.4)));
  }
}

TEST_CASE("pass-through is bit-exact when the codeword already fits") {
  const ChannelSpec spec({1.0, 2.0}, 4.0);
  const auto pstar = waterfill(spec).pstar;
  const double gamma = 0.5;
  EncoderConfig cfg;
  cfg.name = "toy-feedback";
  cfg.block_length = 64;
  const auto enc = make_encoder(cfg, spec);
  const auto mod = modify_code(*enc, spec, gamma, pstar);
  int exact = 0, eligible = 0;
  for (std::uint64_t t = 0; t < 300; ++t) {
    const auto tx = transmit(*enc, t % 16, spec, {3, t});
    bool fits = true;
    for (std::size_t l = 0; l < 2; ++l) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 64; ++k) {
        acc += tx.x(l, k) * tx.x(l, k);
        if (acc > 64.0 * (pstar[l] + gamma)) fits = false;
      }
      if (acc < 64.0 * (pstar[l] - 2 * gamma)) fits = false;
    }
    if (!fits) continue;
    ++eligible;
    exact += replay_codeword(*mod, t % 16, tx.y) == tx.x ? 1 : 0;
  }
  CHECK(eligible > 250);
  CHECK(exact == eligible);
}

TEST_CASE("modified code invariants hold pathwise") {
  const ChannelSpec spec({1.0, 2.0, 0.7}, 3.0);
  const auto pstar = waterfill(spec).pstar;
  const std::size_t n = 30;
  const double L = 3.0;
  for (double gamma : {0.0, 0.05, default_gamma(n)}) {
    std::vector<std::unique_ptr<FeedbackEncoder>> encs;
    for (const auto& name : builtin_encoder_names()) {
      EncoderConfig cfg;
      cfg.name = name;
      cfg.block_length = n;
      encs.push_back(make_encoder(cfg, spec));
    }
    encs.push_back(std::make_unique<EchoEncoder>(3, n, 3.0, 0.9));
    for (const auto& enc : encs) {
      const auto mod = modify_code(*enc, spec, gamma, pstar);
      for (std::uint64_t t = 0; t < 300; ++t) {
        const auto w = t % mod->message_count();
        const auto tx = transmit(*mod, w, spec, {8, t});
        const auto raw = replay_codeword(*enc, w, tx.y);
        double total = 0.0;
        for (std::size_t l = 0; l < 3; ++l) {
          double acc = 0.0, raw_acc = 0.0;
          for (std::size_t k = 0; k + 1 < n; ++k) {
            acc += tx.x(l, k) * tx.x(l, k);
            raw_acc += raw(l, k) * raw(l, k);
            CHECK(acc <= raw_acc);
            CHECK(acc <= n * (pstar[l] + gamma) * (1 + 1e-10));
          }
          const double e = tx.x.row_energy(l);
          total += e;
          CHECK(e >= n * (pstar[l] - L * gamma) - 1e-9 * n * 3.0);
          CHECK(e <= n * (pstar[l] + L * L * gamma) + 1e-9 * n * 3.0);
        }
        CHECK(std::abs(total - n * 3.0) <= 1e-9 * n * 3.0);
        CHECK(in_bounding_box(power_type(tx.x), pstar, L * L * gamma + 1e-9));
      }
    }
  }
}

TEST_CASE("discretize_code") {
  const double P = 1.5;
  const ChannelSpec spec({1.0, 2.0}, P);
  SUBCASE("codeword already on the lattice") {
    // Row energies 2P and P over n_bar = 3 uses: total n_bar P.
    FixedEncoder enc(BlockMatrix::from_rows({{std::sqrt(P), std::sqrt(P), 0.0}, {0.0, 0.0, std::sqrt(P)}}));
    const auto disc = discretize_code(enc, spec);
    CHECK(disc->block_length() == 6);
    const auto x = replay_codeword(*disc, 0, BlockMatrix(2, 6));
    for (std::size_t k = 3; k < 5; ++k) {
      CHECK(x(0, k) == 0.0);
      CHECK(x(1, k) == 0.0);
    }
    CHECK(x(0, 5) == 0.0);
    CHECK(x(1, 5) * x(1, 5) == doctest::Approx(3.0 * P).epsilon(1e-14));
  }
  SUBCASE("random codes land on the lattice") {
    for (const auto& name : builtin_encoder_names()) {
      EncoderConfig cfg;
      cfg.name = name;
      cfg.block_length = 25;
      const auto enc = make_encoder(cfg, spec);
      const auto disc = discretize_code(*enc, spec);
      for (std::uint64_t t = 0; t < 2000; ++t) {
        const auto tx = transmit(*disc, t % 16, spec, {2, t});
        const auto a = lattice_counts(power_type(tx.x), 28, P);
        REQUIRE(a.has_value());
        CHECK(a->at(0) + a->at(1) == 28u);
        // The appended uses carry nothing: the inner codeword is unchanged.
        const auto inner = replay_codeword(disc->inner(), t % 16, tx.y);
        for (std::size_t k = 0; k < 25; ++k) {
          CHECK(inner(0, k) == tx.x(0, k));
          CHECK(inner(1, k) == tx.x(1, k));
        }
      }
    }
  }
}

TEST_CASE("discretization does not change decoding") {
  const ChannelSpec spec({0.3, 0.6}, 1.0);
  EncoderConfig cfg;
  cfg.name = "iid-gaussian";
  cfg.block_length = 6;
  cfg.message_count = 8;
  const auto enc = make_encoder(cfg, spec);
  auto disc = discretize_code(*enc, spec);
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto tx = transmit(*disc, t % 8, spec, {5, t});
    const auto plain = transmit(*enc, t % 8, spec, {5, t});
    // Same seed: the first n_bar noise columns coincide, so the decisions must too.
    CHECK(decode_ml(disc->inner(), tx.y, spec) == decode_ml(*enc, plain.y, spec));
  }
}
