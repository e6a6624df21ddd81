#pragma once
// Fake-user shilling attacks: Random and Bandwagon profile generation and
// injection into a training set. Generation is a pure function of
// (dataset, targets, config, rng).

#include <cstdint>
#include <vector>

#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/rng.hpp"

namespace advrec {

struct FakeProfile {
  UserIndex user;                // >= fake_user_boundary after injection
  std::vector<ItemIndex> items;  // sorted; contains every target
};

// Effective interactions per fake profile: the configured value, or the mean
// genuine train-interaction count (rounded) when the config leaves it at 0.
std::uint32_t effective_profile_size(const InteractionDataset& dataset,
                                     const AttackConfig& config,
                                     std::uint32_t n_targets);

// Targets plus uniformly sampled non-target fillers.
std::vector<FakeProfile> gen_random_attack(const InteractionDataset& dataset,
                                           const TargetSet& targets,
                                           const AttackConfig& config,
                                           RngStream rng);

// Targets plus popular fillers (selected_fraction_popular of filler slots,
// drawn from the top popular_pool_fraction of items by train popularity)
// plus random fillers for the remaining slots.
std::vector<FakeProfile> gen_bandwagon_attack(const InteractionDataset& dataset,
                                              const TargetSet& targets,
                                              const AttackConfig& config,
                                              RngStream rng);

// Appends the fake users' interactions to the train split only; test and
// validation are untouched. Sets fake_user_boundary on the returned copy.
InteractionDataset inject_profiles(const InteractionDataset& dataset,
                                   const std::vector<FakeProfile>& profiles);

}  // namespace advrec
