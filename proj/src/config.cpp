#include "advrec/config.hpp"

#include <cmath>
#include <limits>

namespace advrec {

void RunConfig::validate() const {
  if (d == 0) throw ConfigError("embedding dimension must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be finite and >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (eval_every == 0) throw ConfigError("eval_every must be positive");
  if (k_rec == 0 || k_target == 0) throw ConfigError("k must be positive");
  if (warmup_epochs > epochs)
    throw ConfigError("warmup_epochs cannot exceed epochs");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(clamp_c > 0.0) || !std::isfinite(clamp_c))
    throw ConfigError("clamp_c must be positive and finite");
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0, 1)");
  if (!(validation_fraction_of_train > 0.0 && validation_fraction_of_train < 1.0))
    throw ConfigError("validation_fraction_of_train must be in (0, 1)");
  if (kcore < 1) throw ConfigError("kcore must be >= 1");
}

void AttackConfig::validate() const {
  if (!(budget_fraction > 0.0 && budget_fraction < 1.0))
    throw ConfigError("budget_fraction must be in (0, 1)");
  if (!(popular_pool_fraction > 0.0 && popular_pool_fraction <= 1.0))
    throw ConfigError("popular_pool_fraction must be in (0, 1]");
  if (!(selected_fraction_popular >= 0.0 && selected_fraction_popular <= 1.0))
    throw ConfigError("selected_fraction_popular must be in [0, 1]");
}

}  // namespace advrec
