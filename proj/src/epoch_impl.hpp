#pragma once
// Shared epoch runner behind train_epoch_plain and train_epoch_adversarial.
// One code path guarantees that an adversarial epoch with lambda == 0
// reproduces a plain epoch bit-for-bit on the same rng stream.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "advrec/adv_trainer.hpp"
#include "advrec/cf_engine.hpp"

namespace advrec::detail {

// Per-batch gradient accumulator keyed by embedding row. Rows are updated
// once per batch, in first-touch order. slot() may grow the backing store,
// so take spans only after every slot for the triple has been claimed.
class RowGradients {
 public:
  void reset(std::uint32_t d) {
    d_ = d;
    index_.clear();
    keys_.clear();
    grads_.clear();
  }

  std::size_t slot(bool is_item, std::uint32_t row) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(is_item) << 32) | row;
    auto [it, inserted] = index_.try_emplace(key, keys_.size());
    if (inserted) {
      keys_.push_back(key);
      grads_.resize(grads_.size() + d_, 0.0);
    }
    return it->second;
  }

  std::span<double> span(std::size_t slot) {
    return {grads_.data() + slot * d_, d_};
  }

  template <typename Fn>
  void for_each(Fn&& fn) {
    for (std::size_t s = 0; s < keys_.size(); ++s) {
      const bool is_item = (keys_[s] >> 32) != 0;
      const auto row = static_cast<std::uint32_t>(keys_[s] & 0xFFFFFFFFULL);
      fn(is_item, row, std::span<double>{grads_.data() + s * d_, d_});
    }
  }

 private:
  std::uint32_t d_ = 0;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::uint64_t> keys_;
  std::vector<double> grads_;
};

EpochStats run_epoch(ModelState& state, const InteractionDataset& dataset,
                     const RunConfig& config, RngStream& epoch_rng,
                     UserLossLedger& ledger, const VulnerabilityProfile* profile,
                     bool adversarial);

}  // namespace advrec::detail
