#include "advrec/ledger.hpp"

namespace advrec {

void UserLossLedger::reset(std::uint32_t n_users) {
  sum_loss_.assign(n_users, 0.0);
  count_.assign(n_users, 0);
  epoch_mean_.assign(n_users, 0.0);
  snapshot_count_.assign(n_users, 0);
  global_mean_ = 0.0;
  snapshot_ready_ = false;
}

void UserLossLedger::begin_epoch() {
  sum_loss_.assign(sum_loss_.size(), 0.0);
  count_.assign(count_.size(), 0);
}

void UserLossLedger::finish_epoch() {
  double total = 0.0;
  std::uint64_t users_seen = 0;
  for (std::size_t u = 0; u < sum_loss_.size(); ++u) {
    if (count_[u] > 0) {
      epoch_mean_[u] = sum_loss_[u] / static_cast<double>(count_[u]);
      total += epoch_mean_[u];
      ++users_seen;
    } else {
      epoch_mean_[u] = 0.0;
    }
    snapshot_count_[u] = count_[u];
  }
  global_mean_ = users_seen > 0 ? total / static_cast<double>(users_seen) : 0.0;
  snapshot_ready_ = true;
}

}  // namespace advrec
