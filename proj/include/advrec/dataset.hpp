#pragma once
// Interaction dataset container: train/validation/test splits with dense
// contiguous ids, per-item train popularity and the fake-user boundary.
//
// The validation split is a marked subset of train, used for tuning only.
// Immutable after construction; safe to share across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "advrec/types.hpp"

namespace advrec {

// External key <-> dense index tables, kept for report emission.
struct IdMaps {
  std::vector<std::string> user_keys;
  std::vector<std::string> item_keys;
  std::unordered_map<std::string, UserIndex> user_to_index;
  std::unordered_map<std::string, ItemIndex> item_to_index;
};

struct InteractionDataset {
  std::uint32_t n_users = 0;  // includes injected fake users
  std::uint32_t n_items = 0;

  std::vector<Interaction> train;
  std::vector<Interaction> validation;  // subset of train
  std::vector<Interaction> test;

  std::vector<std::uint32_t> popularity;  // train interactions per item
  std::optional<UserIndex> fake_user_boundary;

  IdMaps ids;

  // Derived adjacency, rebuilt whenever the edge lists change.
  std::vector<std::vector<ItemIndex>> train_items_by_user;  // sorted per user
  std::vector<std::vector<ItemIndex>> test_items_by_user;   // sorted per user

  std::uint32_t genuine_user_count() const {
    return fake_user_boundary ? *fake_user_boundary : n_users;
  }
  bool is_fake(UserIndex u) const {
    return fake_user_boundary && u >= *fake_user_boundary;
  }
  bool in_train(UserIndex u, ItemIndex i) const;

  // Recomputes popularity and the per-user adjacency from the edge lists.
  void rebuild_index();

  // Invariant checks (duplicates, split disjointness, popularity counts).
  // Throws DataError on violation.
  void validate() const;
};

}  // namespace advrec
