#pragma once
// Counter-based random streams with hierarchical forking.
//
// Every consumer (split, init, negatives, attack, ...) gets its own stream
// forked by label from a parent key, so adding draws to one stream never
// shifts another. Output is a pure function of (key, counter), which keeps
// runs byte-reproducible across platforms; the standard <random>
// distributions are implementation-defined and are not used here.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace advrec {

namespace detail {

// Stafford mix13 finalizer, also the SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

class RngStream {
 public:
  RngStream() : key_(0) {}
  explicit RngStream(std::uint64_t key) : key_(key) {}

  // Child stream derived from this stream's key and a purpose label.
  // Independent of how much the parent has been consumed.
  RngStream fork(std::string_view label) const {
    return RngStream(detail::mix64(key_ ^ detail::mix64(detail::fnv1a64(label))));
  }
  RngStream fork(std::uint64_t index) const {
    return RngStream(detail::mix64(key_ ^ detail::mix64(index + detail::kGolden)));
  }

  std::uint64_t next_u64() {
    counter_ += detail::kGolden;
    return detail::mix64(key_ + counter_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). Rejection sampling, unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so log() stays finite
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace advrec
