#pragma once
// Per-user loss accounting. Each training epoch accumulates triple losses
// under the pre-update parameters of their batch; the epoch-boundary
// snapshot feeds the next epoch's vulnerability profile.

#include <cstdint>
#include <vector>

#include "advrec/types.hpp"

namespace advrec {

class UserLossLedger {
 public:
  UserLossLedger() = default;
  explicit UserLossLedger(std::uint32_t n_users) { reset(n_users); }

  void reset(std::uint32_t n_users);

  // Zeroes the accumulators, keeping the last epoch snapshot.
  void begin_epoch();

  void record(UserIndex u, double loss) {
    sum_loss_[u] += loss;
    ++count_[u];
  }

  // Computes per-user epoch means and the global mean over users with
  // at least one recorded triple.
  void finish_epoch();

  std::uint32_t n_users() const { return static_cast<std::uint32_t>(sum_loss_.size()); }
  double sum_loss(UserIndex u) const { return sum_loss_[u]; }
  std::uint64_t count(UserIndex u) const { return count_[u]; }
  double epoch_mean(UserIndex u) const { return epoch_mean_[u]; }
  bool has_snapshot(UserIndex u) const { return snapshot_count_[u] > 0; }
  double global_mean() const { return global_mean_; }
  bool snapshot_ready() const { return snapshot_ready_; }

  const std::vector<double>& epoch_means() const { return epoch_mean_; }

 private:
  std::vector<double> sum_loss_;
  std::vector<std::uint64_t> count_;
  std::vector<double> epoch_mean_;
  std::vector<std::uint64_t> snapshot_count_;
  double global_mean_ = 0.0;
  bool snapshot_ready_ = false;
};

}  // namespace advrec
