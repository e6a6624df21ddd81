#pragma once
// Brute-force reference implementations used only by tests. These stay
// independent of the library's ranking and metric code paths: scores come
// from a naive per-coordinate loop, rankings from a full stable sort and
// set membership from linear scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/model.hpp"
#include "advrec/rng.hpp"

namespace oracle {

using advrec::InteractionDataset;
using advrec::ItemIndex;
using advrec::ModelState;
using advrec::TargetSet;
using advrec::UserIndex;

inline double naive_score(const ModelState& state, UserIndex u, ItemIndex i) {
  double s = 0.0;
  for (std::uint32_t k = 0; k < state.d; ++k)
    s += state.user_factors[static_cast<std::size_t>(u) * state.d + k] *
         state.item_factors[static_cast<std::size_t>(i) * state.d + k];
  return s;
}

inline bool in_list(const std::vector<ItemIndex>& list, ItemIndex item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

// Full sort over every item, score descending with index ascending on ties,
// training items removed afterwards.
inline std::vector<ItemIndex> naive_topk(const ModelState& state,
                                         const InteractionDataset& dataset,
                                         UserIndex u, std::uint32_t k) {
  std::vector<ItemIndex> order(dataset.n_items);
  for (ItemIndex i = 0; i < dataset.n_items; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](ItemIndex a, ItemIndex b) {
    const double sa = naive_score(state, u, a);
    const double sb = naive_score(state, u, b);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  std::vector<ItemIndex> out;
  for (ItemIndex i : order) {
    if (in_list(dataset.train_items_by_user[u], i)) continue;
    out.push_back(i);
    if (out.size() == k) break;
  }
  return out;
}

inline std::vector<std::vector<ItemIndex>> naive_all_topk(
    const ModelState& state, const InteractionDataset& dataset, std::uint32_t k) {
  std::vector<std::vector<ItemIndex>> lists(dataset.genuine_user_count());
  for (UserIndex u = 0; u < lists.size(); ++u)
    lists[u] = naive_topk(state, dataset, u, k);
  return lists;
}

inline double naive_hr(const std::vector<std::vector<ItemIndex>>& lists,
                       const InteractionDataset& dataset, std::uint32_t k) {
  double total = 0.0;
  std::uint32_t counted = 0;
  for (UserIndex u = 0; u < lists.size(); ++u) {
    const auto& test = dataset.test_items_by_user[u];
    if (test.empty()) continue;
    std::uint32_t hits = 0;
    for (std::size_t r = 0; r < std::min<std::size_t>(k, lists[u].size()); ++r)
      if (in_list(test, lists[u][r])) ++hits;
    total += static_cast<double>(hits) / static_cast<double>(test.size());
    ++counted;
  }
  return counted > 0 ? total / counted : 0.0;
}

inline double naive_ndcg(const std::vector<std::vector<ItemIndex>>& lists,
                         const InteractionDataset& dataset, std::uint32_t k) {
  double total = 0.0;
  std::uint32_t counted = 0;
  for (UserIndex u = 0; u < lists.size(); ++u) {
    const auto& test = dataset.test_items_by_user[u];
    if (test.empty()) continue;
    double dcg = 0.0;
    for (std::size_t r = 0; r < std::min<std::size_t>(k, lists[u].size()); ++r)
      if (in_list(test, lists[u][r]))
        dcg += 1.0 / std::log2(static_cast<double>(r + 1) + 1.0);
    double idcg = 0.0;
    for (std::size_t r = 1; r <= std::min<std::size_t>(k, test.size()); ++r)
      idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    total += idcg > 0.0 ? dcg / idcg : 0.0;
    ++counted;
  }
  return counted > 0 ? total / counted : 0.0;
}

inline bool naive_touches(const InteractionDataset& dataset, UserIndex u,
                          ItemIndex item) {
  return in_list(dataset.train_items_by_user[u], item) ||
         in_list(dataset.test_items_by_user[u], item);
}

inline double naive_t_hr(const std::vector<std::vector<ItemIndex>>& lists,
                         const InteractionDataset& dataset,
                         const TargetSet& targets, std::uint32_t k) {
  double total = 0.0;
  for (ItemIndex target : targets.items) {
    std::uint32_t eligible = 0, hits = 0;
    for (UserIndex u = 0; u < lists.size(); ++u) {
      if (naive_touches(dataset, u, target)) continue;
      ++eligible;
      for (std::size_t r = 0; r < std::min<std::size_t>(k, lists[u].size()); ++r) {
        if (lists[u][r] == target) {
          ++hits;
          break;
        }
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(eligible);
  }
  return total / static_cast<double>(targets.items.size());
}

inline double naive_t_ndcg(const std::vector<std::vector<ItemIndex>>& lists,
                           const InteractionDataset& dataset,
                           const TargetSet& targets, std::uint32_t k) {
  double total = 0.0;
  for (ItemIndex target : targets.items) {
    std::uint32_t eligible = 0;
    double gain = 0.0;
    for (UserIndex u = 0; u < lists.size(); ++u) {
      if (naive_touches(dataset, u, target)) continue;
      ++eligible;
      for (std::size_t r = 0; r < std::min<std::size_t>(k, lists[u].size()); ++r) {
        if (lists[u][r] == target) {
          gain += 1.0 / std::log2(static_cast<double>(r + 1) + 1.0);
          break;
        }
      }
    }
    total += gain / static_cast<double>(eligible);
  }
  return total / static_cast<double>(targets.items.size());
}

inline bool naive_status(const std::vector<ItemIndex>& list,
                         const TargetSet& targets, std::uint32_t k) {
  for (std::size_t r = 0; r < std::min<std::size_t>(k, list.size()); ++r)
    if (in_list(targets.items, list[r])) return true;
  return false;
}

// Randomized small instance: dataset with train/test edges, optional fake
// users, a target set with at least one eligible genuine user per target,
// and Gaussian embeddings.
struct Instance {
  InteractionDataset dataset;
  ModelState state;
  TargetSet targets;
};

inline Instance random_instance(advrec::RngStream rng, bool with_fakes = true) {
  for (;;) {
    Instance inst;
    auto& ds = inst.dataset;
    const auto n_genuine = 3 + static_cast<std::uint32_t>(rng.next_below(48));
    const auto n_fake =
        with_fakes && rng.next_below(2) == 0
            ? static_cast<std::uint32_t>(rng.next_below(4))
            : 0;
    ds.n_users = n_genuine + n_fake;
    ds.n_items = 10 + static_cast<std::uint32_t>(rng.next_below(91));
    if (n_fake > 0) ds.fake_user_boundary = n_genuine;

    for (UserIndex u = 0; u < ds.n_users; ++u) {
      const auto degree = 1 + rng.next_below(std::min<std::uint64_t>(10, ds.n_items - 2));
      std::vector<ItemIndex> items;
      for (std::uint64_t t = 0; t < degree; ++t) {
        const auto i = static_cast<ItemIndex>(rng.next_below(ds.n_items));
        if (!in_list(items, i)) items.push_back(i);
      }
      for (ItemIndex i : items) ds.train.push_back({u, i});
      if (u < n_genuine && rng.next_below(10) > 0) {  // some users lack test items
        const auto test_degree = 1 + rng.next_below(3);
        std::vector<ItemIndex> test_items;
        for (std::uint64_t t = 0; t < test_degree; ++t) {
          const auto i = static_cast<ItemIndex>(rng.next_below(ds.n_items));
          if (!in_list(items, i) && !in_list(test_items, i)) test_items.push_back(i);
        }
        for (ItemIndex i : test_items) ds.test.push_back({u, i});
      }
    }
    ds.rebuild_index();

    const auto n_targets = 1 + rng.next_below(5);
    for (std::uint64_t t = 0; t < n_targets * 4 &&
                              inst.targets.items.size() < n_targets; ++t) {
      const auto candidate = static_cast<ItemIndex>(rng.next_below(ds.n_items));
      if (in_list(inst.targets.items, candidate)) continue;
      std::uint32_t eligible = 0;
      for (UserIndex u = 0; u < n_genuine; ++u)
        if (!naive_touches(ds, u, candidate)) ++eligible;
      if (eligible > 0) inst.targets.items.push_back(candidate);
    }
    if (inst.targets.items.empty()) continue;
    std::sort(inst.targets.items.begin(), inst.targets.items.end());

    const auto d = 2 + static_cast<std::uint32_t>(rng.next_below(7));
    inst.state = ModelState(ds.n_users, ds.n_items, d);
    inst.state.init_gaussian(rng.fork("embeddings"), 0.5);
    return inst;
  }
}

// Central finite differences of fn along each coordinate of `row`.
template <typename Fn>
std::vector<double> central_difference(std::vector<double>& row, double h, Fn fn) {
  std::vector<double> grad(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double keep = row[k];
    row[k] = keep + h;
    const double up = fn();
    row[k] = keep - h;
    const double down = fn();
    row[k] = keep;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    norm += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-8);
}

}  // namespace oracle
