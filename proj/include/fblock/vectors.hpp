#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fblock {

/// A vector of finite, nonnegative reals tagged with its domain meaning.
template <class Tag>
class NonnegativeVector {
 public:
  NonnegativeVector() = default;

  explicit NonnegativeVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(Tag::name) + " entries must be finite and nonnegative");
      }
    }
  }

  static NonnegativeVector zeros(std::size_t size) {
    return NonnegativeVector(std::vector<double>(size, 0.0));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  friend bool operator==(const NonnegativeVector&, const NonnegativeVector&) = default;

 private:
  std::vector<double> values_;
};

struct AllocationTag {
  static constexpr const char* name = "power allocation";
};
struct PowerTypeTag {
  static constexpr const char* name = "power type";
};

/// Per-channel power split s (power units per channel use).
using PowerAllocation = NonnegativeVector<AllocationTag>;
/// Per-channel mean-square of a codeword.
using PowerType = NonnegativeVector<PowerTypeTag>;

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("euclidean_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace fblock
