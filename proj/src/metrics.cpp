#include "advrec/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace advrec {

namespace {

double rank_gain(std::uint32_t rank) {  // rank is 1-based
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

bool user_touches_item(const InteractionDataset& dataset, UserIndex u,
                       ItemIndex item) {
  const auto& tr = dataset.train_items_by_user[u];
  const auto& te = dataset.test_items_by_user[u];
  return std::binary_search(tr.begin(), tr.end(), item) ||
         std::binary_search(te.begin(), te.end(), item);
}

}  // namespace

RankedLists rank_all_users(const ModelState& state,
                           const InteractionDataset& dataset, std::uint32_t k) {
  RankedLists lists;
  lists.k = k;
  const auto genuine = dataset.genuine_user_count();
  lists.topk.resize(genuine);
  for (UserIndex u = 0; u < genuine; ++u)
    lists.topk[u] = recommend_topk(state, dataset, u, k, true);
  return lists;
}

MetricValue hr_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                    std::uint32_t k) {
  MetricValue out;
  double total = 0.0;
  std::uint32_t counted = 0;
  for (UserIndex u = 0; u < lists.topk.size(); ++u) {
    const auto& test = dataset.test_items_by_user[u];
    if (test.empty()) {
      ++out.skipped_users;
      continue;
    }
    const auto& list = lists.topk[u];
    const auto depth = std::min<std::size_t>(k, list.size());
    std::uint32_t hits = 0;
    for (std::size_t r = 0; r < depth; ++r)
      if (std::binary_search(test.begin(), test.end(), list[r])) ++hits;
    total += static_cast<double>(hits) / static_cast<double>(test.size());
    ++counted;
  }
  out.value = counted > 0 ? total / counted : 0.0;
  return out;
}

MetricValue ndcg_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                      std::uint32_t k) {
  MetricValue out;
  double total = 0.0;
  std::uint32_t counted = 0;
  for (UserIndex u = 0; u < lists.topk.size(); ++u) {
    const auto& test = dataset.test_items_by_user[u];
    if (test.empty()) {
      ++out.skipped_users;
      continue;
    }
    const auto& list = lists.topk[u];
    const auto depth = std::min<std::size_t>(k, list.size());
    double dcg = 0.0;
    for (std::size_t r = 0; r < depth; ++r)
      if (std::binary_search(test.begin(), test.end(), list[r]))
        dcg += rank_gain(static_cast<std::uint32_t>(r) + 1);
    const auto ideal_depth = std::min<std::size_t>(k, test.size());
    double idcg = 0.0;
    for (std::size_t r = 1; r <= ideal_depth; ++r)
      idcg += rank_gain(static_cast<std::uint32_t>(r));
    total += idcg > 0.0 ? dcg / idcg : 0.0;
    ++counted;
  }
  out.value = counted > 0 ? total / counted : 0.0;
  return out;
}

double target_hr_at_k(const RankedLists& lists, const InteractionDataset& dataset,
                      const TargetSet& targets, std::uint32_t k) {
  double total = 0.0;
  for (ItemIndex target : targets.items) {
    std::uint32_t eligible = 0, hits = 0;
    for (UserIndex u = 0; u < lists.topk.size(); ++u) {
      if (user_touches_item(dataset, u, target)) continue;
      ++eligible;
      const auto& list = lists.topk[u];
      const auto depth = std::min<std::size_t>(k, list.size());
      for (std::size_t r = 0; r < depth; ++r) {
        if (list[r] == target) {
          ++hits;
          break;
        }
      }
    }
    if (eligible == 0)
      throw MetricError("every genuine user interacted with target item " +
                        std::to_string(target));
    total += static_cast<double>(hits) / static_cast<double>(eligible);
  }
  return total / static_cast<double>(targets.items.size());
}

double target_ndcg_at_k(const RankedLists& lists,
                        const InteractionDataset& dataset,
                        const TargetSet& targets, std::uint32_t k) {
  double total = 0.0;
  for (ItemIndex target : targets.items) {
    std::uint32_t eligible = 0;
    double gain_sum = 0.0;
    for (UserIndex u = 0; u < lists.topk.size(); ++u) {
      if (user_touches_item(dataset, u, target)) continue;
      ++eligible;
      const auto& list = lists.topk[u];
      const auto depth = std::min<std::size_t>(k, list.size());
      for (std::size_t r = 0; r < depth; ++r) {
        if (list[r] == target) {
          gain_sum += rank_gain(static_cast<std::uint32_t>(r) + 1);
          break;
        }
      }
    }
    if (eligible == 0)
      throw MetricError("every genuine user interacted with target item " +
                        std::to_string(target));
    total += gain_sum / static_cast<double>(eligible);
  }
  return total / static_cast<double>(targets.items.size());
}

bool attack_status(const RankedLists& lists, const TargetSet& targets,
                   UserIndex u, std::uint32_t k) {
  const auto& list = lists.topk[u];
  const auto depth = std::min<std::size_t>(k, list.size());
  for (std::size_t r = 0; r < depth; ++r)
    if (std::binary_search(targets.items.begin(), targets.items.end(), list[r]))
      return true;
  return false;
}

std::vector<bool> attack_status_all(const RankedLists& lists,
                                    const InteractionDataset& dataset,
                                    const TargetSet& targets, std::uint32_t k) {
  std::vector<bool> flags(lists.topk.size());
  for (UserIndex u = 0; u < lists.topk.size(); ++u)
    flags[u] = attack_status(lists, targets, u, k);
  (void)dataset;
  return flags;
}

std::vector<LossBin> loss_bin_report(const std::vector<double>& per_user_loss,
                                     const std::vector<bool>& statuses,
                                     std::uint32_t n_bins) {
  if (n_bins == 0) throw ConfigError("need at least one loss bin");
  if (per_user_loss.size() != statuses.size())
    throw MetricError("loss and status vectors must align");
  if (per_user_loss.empty()) throw MetricError("empty ledger");

  double lo = per_user_loss.front(), hi = per_user_loss.front();
  for (double v : per_user_loss) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);

  std::vector<LossBin> bins(n_bins);
  for (std::uint32_t b = 0; b < n_bins; ++b) {
    bins[b].lower = lo + width * b;
    bins[b].upper = b + 1 == n_bins ? hi : lo + width * (b + 1);
  }
  for (std::size_t u = 0; u < per_user_loss.size(); ++u) {
    std::uint32_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::uint32_t>((per_user_loss[u] - lo) / width);
      b = std::min(b, n_bins - 1);
    }
    ++bins[b].n_users;
    if (statuses[u]) ++bins[b].n_affected;
  }
  const double visibility = 0.005 * static_cast<double>(per_user_loss.size());
  for (auto& bin : bins) {
    bin.affected_fraction =
        bin.n_users > 0
            ? static_cast<double>(bin.n_affected) / static_cast<double>(bin.n_users)
            : 0.0;
    bin.below_visibility_threshold = bin.n_users < visibility;
  }
  return bins;
}

std::vector<LossBin> loss_bin_report(const UserLossLedger& ledger,
                                     const std::vector<bool>& statuses,
                                     std::uint32_t n_bins) {
  if (!ledger.snapshot_ready()) throw MetricError("ledger has no epoch snapshot");
  if (statuses.size() > ledger.n_users())
    throw MetricError("more statuses than ledger users");

  std::vector<double> losses;
  std::vector<bool> flags;
  for (UserIndex u = 0; u < statuses.size(); ++u) {
    if (!ledger.has_snapshot(u)) continue;
    losses.push_back(ledger.epoch_mean(u));
    flags.push_back(statuses[u]);
  }
  if (losses.empty()) throw MetricError("empty ledger");
  return loss_bin_report(losses, flags, n_bins);
}

FluctuationReport fluctuation_report(const AttackStatusSeries& series) {
  const auto n_checkpoints = series.affected.size();
  if (n_checkpoints < 2)
    throw MetricError("fluctuation report needs at least two checkpoints");
  const auto n_users = series.affected.front().size();
  for (const auto& cp : series.affected)
    if (cp.size() != n_users)
      throw MetricError("inconsistent user counts across checkpoints");

  FluctuationReport report;
  report.affected_count_histogram.assign(n_checkpoints + 1, 0);
  report.change_count_histogram.assign(n_checkpoints + 1, 0);

  for (std::size_t u = 0; u < n_users; ++u) {
    std::uint32_t affected_count = 0;
    std::uint32_t changes = 0;
    bool previous = false;  // the initial state is not being affected
    for (std::size_t c = 0; c < n_checkpoints; ++c) {
      const bool flag = series.affected[c][u];
      if (flag) ++affected_count;
      if (flag != previous) ++changes;
      previous = flag;
    }
    ++report.affected_count_histogram[affected_count];
    if (affected_count > 0) ++report.change_count_histogram[changes];
  }
  return report;
}

}  // namespace advrec
