#pragma once
// Model parameters: user and item embedding tables.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advrec/rng.hpp"
#include "advrec/types.hpp"

namespace advrec {

struct ModelState {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::uint32_t d = 0;
  std::vector<double> user_factors;  // n_users x d, row-major
  std::vector<double> item_factors;  // n_items x d, row-major

  ModelState() = default;
  ModelState(std::uint32_t users, std::uint32_t items, std::uint32_t dim)
      : n_users(users),
        n_items(items),
        d(dim),
        user_factors(static_cast<std::size_t>(users) * dim, 0.0),
        item_factors(static_cast<std::size_t>(items) * dim, 0.0) {}

  std::span<double> user_row(UserIndex u) {
    return {user_factors.data() + static_cast<std::size_t>(u) * d, d};
  }
  std::span<const double> user_row(UserIndex u) const {
    return {user_factors.data() + static_cast<std::size_t>(u) * d, d};
  }
  std::span<double> item_row(ItemIndex i) {
    return {item_factors.data() + static_cast<std::size_t>(i) * d, d};
  }
  std::span<const double> item_row(ItemIndex i) const {
    return {item_factors.data() + static_cast<std::size_t>(i) * d, d};
  }

  // Zero-mean Gaussian init, std 0.1.
  void init_gaussian(RngStream rng, double stddev = 0.1);

  // Throws TrainError if any entry is NaN or infinite.
  void check_finite(const std::string& context) const;
};

// Versioned binary checkpoint with (n_users, n_items, d, seed, epoch)
// header, little-endian throughout.
std::string checkpoint_bytes(const ModelState& state, std::uint64_t seed,
                             std::uint32_t epoch);
void save_checkpoint(const ModelState& state, std::uint64_t seed,
                     std::uint32_t epoch, const std::string& path);
struct CheckpointInfo {
  std::uint64_t seed;
  std::uint32_t epoch;
};
CheckpointInfo checkpoint_from_bytes(ModelState& state, const std::string& bytes);
CheckpointInfo load_checkpoint(ModelState& state, const std::string& path);

}  // namespace advrec
