#pragma once
// Data pipeline: ingestion, k-core filtering, per-user splitting,
// target-item selection and synthetic dataset generation.
//
// Everything here is a pure function of (input, rng stream), so dataset
// preparation can run in parallel across experiment cells.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/rng.hpp"

namespace advrec {

using RawPair = std::pair<std::string, std::string>;

// Parses delimiter-separated interactions (user, item[, rest ignored]).
// Delimiter auto-detected among tab/comma/space on the first data line.
std::vector<RawPair> parse_interactions(const std::string& text);
std::vector<RawPair> load_interactions_file(const std::string& path);

// Dense contiguous ids in first-seen order; duplicate pairs collapse.
struct RemapResult {
  std::vector<Interaction> pairs;
  IdMaps ids;
};
RemapResult remap_ids(const std::vector<RawPair>& raw_pairs);

// Iteratively removes users/items with fewer than kcore interactions until
// fixpoint. The surviving pairs keep their original indices and order.
std::vector<Interaction> k_core_filter(const std::vector<Interaction>& pairs,
                                       std::uint32_t kcore);

// Re-densifies indices after filtering, preserving relative order.
RemapResult compact_ids(const std::vector<Interaction>& pairs, const IdMaps& ids);

// Per-user random partition into train/test plus a validation subset of
// train. Train count = round-half-up(train_fraction * n), clamped to
// [1, n-1] so every user keeps at least one test item.
InteractionDataset split_dataset(const std::vector<Interaction>& pairs,
                                 const IdMaps& ids, const SplitSpec& spec,
                                 RngStream rng);

// Uniform sample of n_targets items from the low-popularity pool: the
// floor(cap * n_items) least popular items, popularity ties broken by a
// seeded shuffle.
TargetSet select_targets(const InteractionDataset& dataset,
                         std::uint32_t n_targets, double cap, RngStream rng);

// Block-structured synthetic interactions: users in block b prefer items in
// block b with in:cross affinity (default 9:1), overall density as given.
std::vector<RawPair> gen_synthetic(std::uint32_t n_users, std::uint32_t n_items,
                                   std::uint32_t n_blocks, double density,
                                   RngStream rng, double affinity = 9.0);

// parse/remap -> k-core -> compact -> split, the full preparation chain.
InteractionDataset prepare_dataset(const std::vector<RawPair>& raw_pairs,
                                   const SplitSpec& spec, RngStream rng);

}  // namespace advrec
