#pragma once
// Adversarial training: uniform-magnitude (APR) and vulnerability-adaptive
// (VAT) embedding perturbations.
//
// Perturbations are single-step fast-gradient ascent directions, normalized
// per embedding row and scaled to the row's magnitude bound: epsilon for
// APR, rho * g(user loss) for VAT. The combined objective adds
// lambda * (batch loss at perturbed rows) to the plain batch loss; the
// perturbation is held fixed when the gradient step is taken.

#include <cstdint>
#include <vector>

#include "advrec/cf_engine.hpp"
#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/ledger.hpp"
#include "advrec/model.hpp"
#include "advrec/rng.hpp"

namespace advrec {

// Maps a user's relative loss deviation delta = (L_u - mean) / mean into
// (0, 1) through a clamped sigmoid. The variant picks the argument:
//   kLiteral            sigma( 1 / delta )
//   kNegatedReciprocal  sigma( -1 / delta )
//   kNegatedRelative    sigma( -delta )
// At delta == 0 the argument takes the one-sided limit from above
// (+clamp_c for kLiteral, -clamp_c for kNegatedReciprocal, 0 for
// kNegatedRelative). Throws ConfigError when mean_loss <= 0.
double vulnerability_weight(double user_loss, double mean_loss,
                            GVariant variant, double clamp_c);

// Per-user loss snapshot and the resulting weights, rebuilt once per epoch
// from the previous epoch's ledger. Users without a snapshot entry are
// treated as sitting exactly at the mean.
struct VulnerabilityProfile {
  std::vector<double> per_user_loss;
  std::vector<double> g_value;
  double mean_loss = 0.0;
  GVariant variant = GVariant::kLiteral;
  double clamp_c = 6.0;
};

VulnerabilityProfile build_vulnerability_profile(const UserLossLedger& ledger,
                                                 GVariant variant,
                                                 double clamp_c);

// Adversarial offsets aligned with the triples of one batch, one row per
// triple occurrence (rows shared across triples are perturbed per
// occurrence, not jointly).
struct PerturbationBatch {
  std::vector<std::vector<double>> delta_user;
  std::vector<std::vector<double>> delta_pos;
  std::vector<std::vector<double>> delta_neg;
  std::vector<double> magnitude;  // per-triple row bound
};

// Ascent direction per row: the gradient of the triple's loss with respect
// to that embedding row at zero perturbation, normalized to the row's
// magnitude. Rows with gradient norm < 1e-12 get a zero offset.
PerturbationBatch compute_perturbation(const ModelState& state,
                                       const std::vector<BprTriple>& batch,
                                       const std::vector<double>& magnitudes,
                                       double weight_decay);

// Plain batch loss plus lambda times the batch loss re-evaluated with each
// triple's rows offset by its perturbation. Both terms sum over triples.
double adversarial_loss(const ModelState& state,
                        const std::vector<BprTriple>& batch,
                        const PerturbationBatch& delta, double lambda,
                        double weight_decay);

// One adversarial epoch: per batch, compute magnitudes (APR: epsilon for
// every row; VAT: rho * g(L_u) for the user's triple rows), build the
// perturbation, take one SGD step on the combined objective. The ledger
// accumulates the unperturbed triple losses for the next epoch's profile.
// With lambda == 0 this reproduces train_epoch_plain bit-for-bit given the
// same rng stream.
EpochStats train_epoch_adversarial(ModelState& state,
                                   const InteractionDataset& dataset,
                                   const RunConfig& config, RngStream& epoch_rng,
                                   UserLossLedger& ledger,
                                   const VulnerabilityProfile& profile);

}  // namespace advrec
