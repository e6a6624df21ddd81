#include "advrec/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace advrec {

namespace {

std::uint32_t fake_user_count(const InteractionDataset& dataset,
                              const AttackConfig& config) {
  const double genuine = dataset.genuine_user_count();
  return std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::llround(config.budget_fraction * genuine)));
}

// Uniform sample without replacement from `source` minus `excluded`,
// appended to `items`.
void sample_fillers(const std::vector<ItemIndex>& source,
                    const std::unordered_set<ItemIndex>& excluded,
                    std::uint32_t count, RngStream& rng,
                    std::vector<ItemIndex>& items) {
  std::vector<ItemIndex> pool;
  pool.reserve(source.size());
  for (ItemIndex i : source)
    if (!excluded.count(i)) pool.push_back(i);
  if (pool.size() < count)
    throw AttackError("filler pool exhausted: need " + std::to_string(count) +
                      " items, have " + std::to_string(pool.size()));
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto j = t + static_cast<std::uint32_t>(rng.next_below(pool.size() - t));
    std::swap(pool[t], pool[j]);
    items.push_back(pool[t]);
  }
}

std::vector<ItemIndex> all_items(std::uint32_t n_items) {
  std::vector<ItemIndex> v(n_items);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<FakeProfile> finalize(std::vector<std::vector<ItemIndex>> item_sets,
                                  const InteractionDataset& dataset) {
  std::vector<FakeProfile> profiles;
  profiles.reserve(item_sets.size());
  UserIndex next = dataset.n_users;
  for (auto& items : item_sets) {
    std::sort(items.begin(), items.end());
    profiles.push_back({next++, std::move(items)});
  }
  return profiles;
}

}  // namespace

std::uint32_t effective_profile_size(const InteractionDataset& dataset,
                                     const AttackConfig& config,
                                     std::uint32_t n_targets) {
  std::uint32_t size = config.profile_size;
  if (size == 0) {
    std::uint64_t genuine_train = 0;
    for (const auto& p : dataset.train)
      if (!dataset.is_fake(p.user)) ++genuine_train;
    const double mean =
        static_cast<double>(genuine_train) / dataset.genuine_user_count();
    size = static_cast<std::uint32_t>(std::llround(mean));
  }
  if (size < n_targets)
    throw AttackError("profile_size smaller than the target count");
  if (size > dataset.n_items)
    throw AttackError("profile_size exceeds the item catalog");
  return size;
}

std::vector<FakeProfile> gen_random_attack(const InteractionDataset& dataset,
                                           const TargetSet& targets,
                                           const AttackConfig& config,
                                           RngStream rng) {
  config.validate();
  const auto profile_size =
      effective_profile_size(dataset, config, targets.items.size());
  const auto n_fake = fake_user_count(dataset, config);
  const std::uint32_t filler_count = profile_size - targets.items.size();
  const std::unordered_set<ItemIndex> target_set(targets.items.begin(),
                                                 targets.items.end());
  const auto catalog = all_items(dataset.n_items);

  std::vector<std::vector<ItemIndex>> item_sets(n_fake);
  for (auto& items : item_sets) {
    items = targets.items;
    sample_fillers(catalog, target_set, filler_count, rng, items);
  }
  return finalize(std::move(item_sets), dataset);
}

std::vector<FakeProfile> gen_bandwagon_attack(const InteractionDataset& dataset,
                                              const TargetSet& targets,
                                              const AttackConfig& config,
                                              RngStream rng) {
  config.validate();
  const auto profile_size =
      effective_profile_size(dataset, config, targets.items.size());
  const auto n_fake = fake_user_count(dataset, config);
  const std::uint32_t filler_count = profile_size - targets.items.size();
  const auto popular_count = static_cast<std::uint32_t>(
      std::llround(config.selected_fraction_popular * filler_count));
  const std::uint32_t random_count = filler_count - popular_count;
  const std::unordered_set<ItemIndex> target_set(targets.items.begin(),
                                                 targets.items.end());

  // top items by train popularity, ties by ascending index
  auto order = all_items(dataset.n_items);
  std::sort(order.begin(), order.end(), [&](ItemIndex a, ItemIndex b) {
    if (dataset.popularity[a] != dataset.popularity[b])
      return dataset.popularity[a] > dataset.popularity[b];
    return a < b;
  });
  const auto pool_size = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(
             std::floor(config.popular_pool_fraction * dataset.n_items)));
  std::vector<ItemIndex> popular_pool(order.begin(), order.begin() + pool_size);

  const auto catalog = all_items(dataset.n_items);
  std::vector<std::vector<ItemIndex>> item_sets(n_fake);
  for (auto& items : item_sets) {
    items = targets.items;
    sample_fillers(popular_pool, target_set, popular_count, rng, items);
    std::unordered_set<ItemIndex> excluded(items.begin(), items.end());
    sample_fillers(catalog, excluded, random_count, rng, items);
  }
  return finalize(std::move(item_sets), dataset);
}

InteractionDataset inject_profiles(const InteractionDataset& dataset,
                                   const std::vector<FakeProfile>& profiles) {
  InteractionDataset out = dataset;
  if (!out.fake_user_boundary) out.fake_user_boundary = out.n_users;

  for (const auto& profile : profiles) {
    if (profile.user < out.n_users)
      throw AttackError("fake user index collides with an existing user");
    if (profile.user != out.n_users)
      throw AttackError("fake user indices must be dense");
    out.n_users += 1;
    out.ids.user_keys.push_back("fake:" + std::to_string(profile.user));
    out.ids.user_to_index.emplace(out.ids.user_keys.back(), profile.user);
    for (ItemIndex i : profile.items) {
      if (i >= out.n_items) throw AttackError("fake profile item out of range");
      out.train.push_back({profile.user, i});
    }
  }
  out.rebuild_index();
  return out;
}

}  // namespace advrec
