#include "advrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace advrec {

namespace {

std::uint32_t round_half_up(double x) {
  return static_cast<std::uint32_t>(std::floor(x + 0.5));
}

char detect_delimiter(const std::string& line) {
  if (line.find('\t') != std::string::npos) return '\t';
  if (line.find(',') != std::string::npos) return ',';
  return ' ';
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      // runs of spaces collapse; tab/comma fields may be empty
      if (delim != ' ' || !cur.empty()) fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || (delim != ' ' && !fields.empty())) fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<RawPair> parse_interactions(const std::string& text) {
  std::vector<RawPair> pairs;
  std::istringstream in(text);
  std::string line;
  char delim = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (delim == 0) delim = detect_delimiter(line);
    auto fields = split_fields(line, delim);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
      throw DataError("line " + std::to_string(line_no) +
                      ": expected at least user and item columns");
    pairs.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  if (pairs.empty()) throw DataError("no interactions in input");
  return pairs;
}

std::vector<RawPair> load_interactions_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_interactions(buf.str());
}

RemapResult remap_ids(const std::vector<RawPair>& raw_pairs) {
  if (raw_pairs.empty()) throw DataError("no interactions to ingest");
  RemapResult out;
  std::set<Interaction> seen;
  for (const auto& [user_key, item_key] : raw_pairs) {
    auto [uit, user_new] =
        out.ids.user_to_index.try_emplace(user_key, out.ids.user_keys.size());
    if (user_new) out.ids.user_keys.push_back(user_key);
    auto [iit, item_new] =
        out.ids.item_to_index.try_emplace(item_key, out.ids.item_keys.size());
    if (item_new) out.ids.item_keys.push_back(item_key);
    Interaction p{uit->second, iit->second};
    if (seen.insert(p).second) out.pairs.push_back(p);
  }
  return out;
}

std::vector<Interaction> k_core_filter(const std::vector<Interaction>& pairs,
                                       std::uint32_t kcore) {
  if (kcore < 1) throw ConfigError("kcore must be >= 1");
  std::vector<Interaction> current = pairs;
  for (;;) {
    std::uint32_t max_user = 0, max_item = 0;
    for (const auto& p : current) {
      max_user = std::max(max_user, p.user + 1);
      max_item = std::max(max_item, p.item + 1);
    }
    std::vector<std::uint32_t> user_deg(max_user, 0), item_deg(max_item, 0);
    for (const auto& p : current) {
      ++user_deg[p.user];
      ++item_deg[p.item];
    }
    std::vector<Interaction> next;
    next.reserve(current.size());
    for (const auto& p : current) {
      if (user_deg[p.user] >= kcore && item_deg[p.item] >= kcore)
        next.push_back(p);
    }
    if (next.size() == current.size()) break;
    current = std::move(next);
    if (current.empty()) throw DataError("dataset degenerate after k-core filter");
  }
  if (current.empty()) throw DataError("dataset degenerate after k-core filter");
  return current;
}

RemapResult compact_ids(const std::vector<Interaction>& pairs, const IdMaps& ids) {
  RemapResult out;
  std::vector<std::int64_t> user_map(ids.user_keys.size(), -1);
  std::vector<std::int64_t> item_map(ids.item_keys.size(), -1);
  for (const auto& p : pairs) {
    if (user_map[p.user] < 0) {
      user_map[p.user] = static_cast<std::int64_t>(out.ids.user_keys.size());
      out.ids.user_keys.push_back(ids.user_keys[p.user]);
    }
    if (item_map[p.item] < 0) {
      item_map[p.item] = static_cast<std::int64_t>(out.ids.item_keys.size());
      out.ids.item_keys.push_back(ids.item_keys[p.item]);
    }
    out.pairs.push_back({static_cast<UserIndex>(user_map[p.user]),
                         static_cast<ItemIndex>(item_map[p.item])});
  }
  for (std::size_t u = 0; u < out.ids.user_keys.size(); ++u)
    out.ids.user_to_index.emplace(out.ids.user_keys[u], static_cast<UserIndex>(u));
  for (std::size_t i = 0; i < out.ids.item_keys.size(); ++i)
    out.ids.item_to_index.emplace(out.ids.item_keys[i], static_cast<ItemIndex>(i));
  return out;
}

InteractionDataset split_dataset(const std::vector<Interaction>& pairs,
                                 const IdMaps& ids, const SplitSpec& spec,
                                 RngStream rng) {
  spec.validate();
  if (pairs.empty()) throw DataError("nothing to split");

  const auto n_users = static_cast<std::uint32_t>(ids.user_keys.size());
  const auto n_items = static_cast<std::uint32_t>(ids.item_keys.size());
  std::vector<std::vector<ItemIndex>> by_user(n_users);
  for (const auto& p : pairs) by_user[p.user].push_back(p.item);

  InteractionDataset ds;
  ds.n_users = n_users;
  ds.n_items = n_items;
  ds.ids = ids;

  for (UserIndex u = 0; u < n_users; ++u) {
    auto& items = by_user[u];
    const auto n = static_cast<std::uint32_t>(items.size());
    if (n < 2)
      throw DataError("user " + ids.user_keys[u] +
                      " has fewer than 2 interactions; cannot split");
    rng.shuffle(items);
    std::uint32_t train_count = round_half_up(spec.train_fraction * n);
    train_count = std::clamp<std::uint32_t>(train_count, 1, n - 1);
    for (std::uint32_t idx = 0; idx < n; ++idx) {
      if (idx < train_count)
        ds.train.push_back({u, items[idx]});
      else
        ds.test.push_back({u, items[idx]});
    }
    std::uint32_t val_count =
        round_half_up(spec.validation_fraction_of_train * train_count);
    val_count = std::min(val_count, train_count);
    if (val_count > 0) {
      std::vector<ItemIndex> train_part(items.begin(), items.begin() + train_count);
      rng.shuffle(train_part);
      for (std::uint32_t idx = 0; idx < val_count; ++idx)
        ds.validation.push_back({u, train_part[idx]});
    }
  }
  ds.rebuild_index();
  return ds;
}

TargetSet select_targets(const InteractionDataset& dataset,
                         std::uint32_t n_targets, double cap, RngStream rng) {
  if (!(cap > 0.0 && cap <= 1.0))
    throw ConfigError("popularity cap must be in (0, 1]");
  if (n_targets == 0) throw ConfigError("need at least one target");

  const auto pool_size =
      static_cast<std::uint32_t>(std::floor(cap * dataset.n_items));
  if (pool_size < n_targets)
    throw DataError("low-popularity pool smaller than the target count");

  // popularity ascending, ties broken by a seeded shuffle value
  std::vector<std::uint64_t> tiebreak(dataset.n_items);
  for (auto& t : tiebreak) t = rng.next_u64();
  std::vector<ItemIndex> order(dataset.n_items);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](ItemIndex a, ItemIndex b) {
    return std::tuple(dataset.popularity[a], tiebreak[a], a) <
           std::tuple(dataset.popularity[b], tiebreak[b], b);
  });

  std::vector<ItemIndex> pool(order.begin(), order.begin() + pool_size);
  // uniform sample without replacement: partial Fisher-Yates prefix
  for (std::uint32_t i = 0; i < n_targets; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.next_below(pool_size - i));
    std::swap(pool[i], pool[j]);
  }
  TargetSet targets;
  targets.popularity_percentile_cap = cap;
  targets.items.assign(pool.begin(), pool.begin() + n_targets);
  std::sort(targets.items.begin(), targets.items.end());
  return targets;
}

std::vector<RawPair> gen_synthetic(std::uint32_t n_users, std::uint32_t n_items,
                                   std::uint32_t n_blocks, double density,
                                   RngStream rng, double affinity) {
  if (n_users == 0 || n_items == 0 || n_blocks == 0)
    throw ConfigError("synthetic sizes must be positive");
  if (!(density > 0.0 && density <= 1.0))
    throw ConfigError("density must be in (0, 1]");
  if (!(affinity >= 1.0)) throw ConfigError("affinity must be >= 1");
  if (n_blocks > n_users || n_blocks > n_items)
    throw ConfigError("more blocks than users or items");

  const double b = static_cast<double>(n_blocks);
  const double mean_weight = affinity / b + (b - 1.0) / b;
  const double p_in = std::min(1.0, density * affinity / mean_weight);
  const double p_out = std::min(1.0, density / mean_weight);

  std::vector<RawPair> pairs;
  pairs.reserve(static_cast<std::size_t>(density * n_users * n_items));
  for (std::uint32_t u = 0; u < n_users; ++u) {
    const std::uint64_t user_block =
        static_cast<std::uint64_t>(u) * n_blocks / n_users;
    for (std::uint32_t i = 0; i < n_items; ++i) {
      const std::uint64_t item_block =
          static_cast<std::uint64_t>(i) * n_blocks / n_items;
      const double p = user_block == item_block ? p_in : p_out;
      if (rng.next_double() < p)
        pairs.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
    }
  }
  if (pairs.empty()) throw DataError("synthetic generation produced no pairs");
  return pairs;
}

InteractionDataset prepare_dataset(const std::vector<RawPair>& raw_pairs,
                                   const SplitSpec& spec, RngStream rng) {
  auto remapped = remap_ids(raw_pairs);
  auto filtered = k_core_filter(remapped.pairs, spec.kcore);
  auto compact = compact_ids(filtered, remapped.ids);
  return split_dataset(compact.pairs, compact.ids, spec, rng.fork("split"));
}

}  // namespace advrec
