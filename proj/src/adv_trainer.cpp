#include "advrec/adv_trainer.hpp"

#include <cmath>

#include "epoch_impl.hpp"

namespace advrec {

double vulnerability_weight(double user_loss, double mean_loss,
                            GVariant variant, double clamp_c) {
  if (!(mean_loss > 0.0))
    throw ConfigError("mean user loss must be positive for the g weight");
  if (user_loss < 0.0) throw ConfigError("user loss must be non-negative");

  const double delta = (user_loss - mean_loss) / mean_loss;
  double arg;
  switch (variant) {
    case GVariant::kLiteral:
      arg = delta == 0.0 ? clamp_c : 1.0 / delta;
      break;
    case GVariant::kNegatedReciprocal:
      arg = delta == 0.0 ? -clamp_c : -1.0 / delta;
      break;
    case GVariant::kNegatedRelative:
      arg = -delta;
      break;
    default:
      arg = 0.0;
  }
  arg = std::clamp(arg, -clamp_c, clamp_c);
  return sigmoid(arg);
}

VulnerabilityProfile build_vulnerability_profile(const UserLossLedger& ledger,
                                                 GVariant variant,
                                                 double clamp_c) {
  VulnerabilityProfile profile;
  profile.variant = variant;
  profile.clamp_c = clamp_c;
  profile.mean_loss = ledger.global_mean();
  const auto n = ledger.n_users();
  profile.per_user_loss.resize(n);
  profile.g_value.resize(n);
  for (UserIndex u = 0; u < n; ++u) {
    // users without a snapshot entry are treated as sitting at the mean
    const double loss =
        ledger.has_snapshot(u) ? ledger.epoch_mean(u) : profile.mean_loss;
    profile.per_user_loss[u] = loss;
    profile.g_value[u] =
        vulnerability_weight(loss, profile.mean_loss, variant, clamp_c);
  }
  return profile;
}

namespace {

void scale_to_magnitude(std::vector<double>& row, double magnitude) {
  double norm_sq = 0.0;
  for (double v : row) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (norm < 1e-12 || magnitude == 0.0) {
    std::fill(row.begin(), row.end(), 0.0);
    return;
  }
  const double scale = magnitude / norm;
  for (double& v : row) v *= scale;
}

}  // namespace

PerturbationBatch compute_perturbation(const ModelState& state,
                                       const std::vector<BprTriple>& batch,
                                       const std::vector<double>& magnitudes,
                                       double weight_decay) {
  if (magnitudes.size() != batch.size())
    throw ConfigError("one magnitude per batch triple expected");
  PerturbationBatch out;
  const std::size_t n = batch.size();
  const std::uint32_t d = state.d;
  out.delta_user.assign(n, std::vector<double>(d));
  out.delta_pos.assign(n, std::vector<double>(d));
  out.delta_neg.assign(n, std::vector<double>(d));
  out.magnitude = magnitudes;

  for (std::size_t t = 0; t < n; ++t) {
    if (!(magnitudes[t] >= 0.0))
      throw ConfigError("perturbation magnitude must be >= 0");
    const auto& triple = batch[t];
    bpr_gradients(state, triple, weight_decay, out.delta_user[t],
                  out.delta_pos[t], out.delta_neg[t]);
    scale_to_magnitude(out.delta_user[t], magnitudes[t]);
    scale_to_magnitude(out.delta_pos[t], magnitudes[t]);
    scale_to_magnitude(out.delta_neg[t], magnitudes[t]);
  }
  return out;
}

double adversarial_loss(const ModelState& state,
                        const std::vector<BprTriple>& batch,
                        const PerturbationBatch& delta, double lambda,
                        double weight_decay) {
  const std::uint32_t d = state.d;
  std::vector<double> pu(d), qi(d), qj(d);
  double plain = 0.0, perturbed = 0.0;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const auto& triple = batch[t];
    plain += bpr_loss(state, triple, weight_decay);

    const auto base_u = state.user_row(triple.user);
    const auto base_i = state.item_row(triple.pos);
    const auto base_j = state.item_row(triple.neg);
    for (std::uint32_t k = 0; k < d; ++k) {
      pu[k] = base_u[k] + delta.delta_user[t][k];
      qi[k] = base_i[k] + delta.delta_pos[t][k];
      qj[k] = base_j[k] + delta.delta_neg[t][k];
    }
    perturbed += bpr_loss_rows(pu, qi, qj, weight_decay);
  }
  return plain + lambda * perturbed;
}

EpochStats train_epoch_adversarial(ModelState& state,
                                   const InteractionDataset& dataset,
                                   const RunConfig& config, RngStream& epoch_rng,
                                   UserLossLedger& ledger,
                                   const VulnerabilityProfile& profile) {
  return detail::run_epoch(state, dataset, config, epoch_rng, ledger, &profile,
                           /*adversarial=*/true);
}

namespace detail {

EpochStats run_epoch(ModelState& state, const InteractionDataset& dataset,
                     const RunConfig& config, RngStream& epoch_rng,
                     UserLossLedger& ledger, const VulnerabilityProfile* profile,
                     bool adversarial) {
  if (ledger.n_users() != dataset.n_users)
    throw TrainError("ledger sized for a different user count");
  const bool perturb = adversarial && config.lambda != 0.0;
  if (perturb && config.defense == Defense::kVat && profile == nullptr)
    throw TrainError("VAT epoch requires a vulnerability profile");

  std::vector<Interaction> order = dataset.train;
  epoch_rng.shuffle(order);

  const std::uint32_t d = state.d;
  const double lr = config.learning_rate;
  const double wd = config.weight_decay;

  EpochStats stats;
  double plain_total = 0.0, adv_total = 0.0;

  std::vector<BprTriple> batch;
  std::vector<double> magnitudes;
  RowGradients grads;
  std::vector<double> pu(d), qi(d), qj(d);
  std::vector<double> tu(d), ti(d), tj(d);  // per-triple gradient scratch

  ledger.begin_epoch();

  for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
    const std::size_t stop =
        std::min(order.size(), start + config.batch_size);

    batch.clear();
    for (std::size_t idx = start; idx < stop; ++idx) {
      const auto& pair = order[idx];
      batch.push_back(
          {pair.user, pair.item, sample_negative(dataset, pair.user, epoch_rng)});
    }

    grads.reset(d);

    // plain term: forward, ledger, gradients at the batch's pre-update state
    for (const auto& triple : batch) {
      const double loss = bpr_loss(state, triple, wd);
      ledger.record(triple.user, loss);
      plain_total += loss;

      bpr_gradients(state, triple, wd, tu, ti, tj);
      const auto su = grads.slot(false, triple.user);
      const auto si = grads.slot(true, triple.pos);
      const auto sj = grads.slot(true, triple.neg);
      auto gu = grads.span(su);
      auto gi = grads.span(si);
      auto gj = grads.span(sj);
      for (std::uint32_t k = 0; k < d; ++k) {
        gu[k] += tu[k];
        gi[k] += ti[k];
        gj[k] += tj[k];
      }
    }

    if (perturb) {
      magnitudes.clear();
      for (const auto& triple : batch) {
        magnitudes.push_back(config.defense == Defense::kVat
                                 ? config.rho * profile->g_value[triple.user]
                                 : config.epsilon);
      }
      const auto delta = compute_perturbation(state, batch, magnitudes, wd);

      for (std::size_t t = 0; t < batch.size(); ++t) {
        const auto& triple = batch[t];
        const auto base_u = state.user_row(triple.user);
        const auto base_i = state.item_row(triple.pos);
        const auto base_j = state.item_row(triple.neg);
        for (std::uint32_t k = 0; k < d; ++k) {
          pu[k] = base_u[k] + delta.delta_user[t][k];
          qi[k] = base_i[k] + delta.delta_pos[t][k];
          qj[k] = base_j[k] + delta.delta_neg[t][k];
        }
        adv_total += bpr_loss_rows(pu, qi, qj, wd);

        // gradient of the perturbed term with respect to the base rows;
        // the perturbation itself is held fixed
        bpr_gradients_rows(pu, qi, qj, wd, tu, ti, tj);
        const auto su = grads.slot(false, triple.user);
        const auto si = grads.slot(true, triple.pos);
        const auto sj = grads.slot(true, triple.neg);
        auto gu = grads.span(su);
        auto gi = grads.span(si);
        auto gj = grads.span(sj);
        const double w = config.lambda;
        for (std::uint32_t k = 0; k < d; ++k) {
          gu[k] += w * tu[k];
          gi[k] += w * ti[k];
          gj[k] += w * tj[k];
        }
      }
    }

    bool finite = true;
    grads.for_each([&](bool is_item, std::uint32_t row, std::span<double> g) {
      auto target = is_item ? state.item_row(row) : state.user_row(row);
      for (std::uint32_t k = 0; k < d; ++k) {
        target[k] -= lr * g[k];
        finite = finite && std::isfinite(target[k]);
      }
    });
    if (!finite)
      throw TrainError("non-finite embedding after batch update at pair offset " +
                       std::to_string(start));

    stats.triple_count += batch.size();
  }

  ledger.finish_epoch();
  if (stats.triple_count > 0) {
    stats.mean_plain_loss = plain_total / static_cast<double>(stats.triple_count);
    if (perturb)
      stats.mean_adversarial_loss =
          adv_total / static_cast<double>(stats.triple_count);
  }
  return stats;
}

}  // namespace detail

}  // namespace advrec
