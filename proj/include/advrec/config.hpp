#pragma once
// Run, split, target and attack configuration.

#include <cstdint>
#include <vector>

#include "advrec/types.hpp"

namespace advrec {

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint32_t d = 32;
  double learning_rate = 0.05;
  double weight_decay = 1e-6;
  std::uint32_t epochs = 100;
  std::uint32_t warmup_epochs = 10;
  std::uint32_t batch_size = 64;
  std::uint32_t eval_every = 10;
  std::uint32_t k_rec = 20;
  std::uint32_t k_target = 50;

  Defense defense = Defense::kNone;
  double epsilon = 0.6;        // uniform perturbation magnitude
  double rho = 0.6;            // base magnitude scaled by the g weight
  double lambda = 1.0;         // adversarial loss weight
  GVariant g_variant = GVariant::kLiteral;
  double clamp_c = 6.0;        // sigmoid-argument clamp in g

  // Throws ConfigError on invalid values.
  void validate() const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  double validation_fraction_of_train = 0.1;
  std::uint32_t kcore = 10;

  void validate() const;
};

struct TargetSet {
  std::vector<ItemIndex> items;
  double popularity_percentile_cap = 0.05;
};

struct AttackConfig {
  double budget_fraction = 0.01;        // fake users per genuine user
  std::uint32_t profile_size = 0;       // 0 = mean genuine train count
  double popular_pool_fraction = 0.1;   // bandwagon popular pool
  double selected_fraction_popular = 0.5;  // bandwagon filler slots from pool

  void validate() const;
};

}  // namespace advrec
