#include "advrec/dataset.hpp"

#include <algorithm>
#include <set>

namespace advrec {

bool InteractionDataset::in_train(UserIndex u, ItemIndex i) const {
  const auto& items = train_items_by_user[u];
  return std::binary_search(items.begin(), items.end(), i);
}

void InteractionDataset::rebuild_index() {
  popularity.assign(n_items, 0);
  train_items_by_user.assign(n_users, {});
  test_items_by_user.assign(n_users, {});
  for (const auto& [u, i] : train) {
    ++popularity[i];
    train_items_by_user[u].push_back(i);
  }
  for (const auto& [u, i] : test) {
    test_items_by_user[u].push_back(i);
  }
  for (auto& v : train_items_by_user) std::sort(v.begin(), v.end());
  for (auto& v : test_items_by_user) std::sort(v.begin(), v.end());
}

void InteractionDataset::validate() const {
  auto check_no_duplicates = [](const std::vector<Interaction>& split,
                                const char* name) {
    std::set<Interaction> seen(split.begin(), split.end());
    if (seen.size() != split.size())
      throw DataError(std::string("duplicate pairs in ") + name);
  };
  check_no_duplicates(train, "train");
  check_no_duplicates(test, "test");
  check_no_duplicates(validation, "validation");

  std::set<Interaction> train_set(train.begin(), train.end());
  for (const auto& p : test) {
    if (train_set.count(p)) throw DataError("train/test overlap");
    if (p.user >= n_users || p.item >= n_items)
      throw DataError("test index out of range");
  }
  for (const auto& p : train) {
    if (p.user >= n_users || p.item >= n_items)
      throw DataError("train index out of range");
  }
  for (const auto& p : validation) {
    if (!train_set.count(p)) throw DataError("validation pair not in train");
  }

  std::vector<std::uint32_t> counts(n_items, 0);
  for (const auto& p : train) ++counts[p.item];
  if (counts != popularity) throw DataError("popularity out of date");
}

}  // namespace advrec
