#pragma once
// Recommendation-quality metrics (HR@k, NDCG@k), attack-success metrics
// (T-HR@k, T-NDCG@k, per-user attack status) and the two diagnostic
// analyses: loss-bin attack rates and attack-status fluctuation.
//
// All metrics are computed over genuine users only; injected fake users
// contribute to no numerator or denominator.

#include <cstdint>
#include <vector>

#include "advrec/cf_engine.hpp"
#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/ledger.hpp"
#include "advrec/model.hpp"

namespace advrec {

// Top-k lists for every genuine user, computed once and shared by the
// metric functions (k must cover the largest k queried).
struct RankedLists {
  std::uint32_t k = 0;
  std::vector<std::vector<ItemIndex>> topk;  // index = genuine user
};

RankedLists rank_all_users(const ModelState& state,
                           const InteractionDataset& dataset, std::uint32_t k);

struct MetricValue {
  double value = 0.0;
  std::uint32_t skipped_users = 0;  // genuine users without test items
};

// Recall-style hit ratio: mean over genuine users of
// |top-k intersect test_u| / |test_u|.
MetricValue hr_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                    std::uint32_t k);

// Mean over genuine users of DCG@k / IDCG@k with 1/log2(rank+1) gains.
MetricValue ndcg_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                      std::uint32_t k);

// Mean over targets of the fraction of eligible genuine users (no train or
// test interaction with the target) whose top-k contains the target.
// Throws MetricError if some target leaves no eligible user.
double target_hr_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                      const TargetSet& targets, std::uint32_t k);

// Rank-discounted version: per (target, eligible user), 1/log2(rank+1) when
// the target sits at that rank, averaged like target_hr_at_k.
double target_ndcg_at_k(const RankedLists& lists,
                        const InteractionDataset& dataset,
                        const TargetSet& targets, std::uint32_t k);

// True iff any target appears in the user's top-k list (k = 50 in the
// standard protocol).
bool attack_status(const RankedLists& lists, const TargetSet& targets,
                   UserIndex u, std::uint32_t k);

std::vector<bool> attack_status_all(const RankedLists& lists,
                                    const InteractionDataset& dataset,
                                    const TargetSet& targets, std::uint32_t k);

// Affected flags per evaluation checkpoint, genuine users only.
struct AttackStatusSeries {
  std::vector<std::uint32_t> checkpoint_epochs;
  std::vector<std::vector<bool>> affected;  // [checkpoint][genuine user]
};

struct LossBin {
  double lower = 0.0;
  double upper = 0.0;
  std::uint32_t n_users = 0;
  std::uint32_t n_affected = 0;
  double affected_fraction = 0.0;
  bool below_visibility_threshold = false;  // holds < 0.5% of users
};

// Equal-width bins over [min user loss, max user loss] from the ledger's
// epoch snapshot, paired with the checkpoint's affected flags.
std::vector<LossBin> loss_bin_report(const UserLossLedger& ledger,
                                     const std::vector<bool>& statuses,
                                     std::uint32_t n_bins);

// Same binning over an explicit per-user loss vector (aligned with statuses).
std::vector<LossBin> loss_bin_report(const std::vector<double>& per_user_loss,
                                     const std::vector<bool>& statuses,
                                     std::uint32_t n_bins);

struct FluctuationReport {
  // affected_count_histogram[c] = users flagged at exactly c checkpoints.
  std::vector<std::uint32_t> affected_count_histogram;
  // change_count_histogram[c] = ever-affected users whose status sequence,
  // with an initial unaffected state prepended, has exactly c adjacent
  // differing pairs.
  std::vector<std::uint32_t> change_count_histogram;
};

FluctuationReport fluctuation_report(const AttackStatusSeries& series);

}  // namespace advrec
