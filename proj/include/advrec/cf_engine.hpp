#pragma once
// Matrix-factorization backbone: dot-product scoring, pairwise ranking loss
// over (user, positive, negative) triples, plain SGD epochs and full-catalog
// top-k ranking with deterministic tie-breaking.

#include <cstdint>
#include <span>
#include <vector>

#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/ledger.hpp"
#include "advrec/model.hpp"
#include "advrec/rng.hpp"

namespace advrec {

struct BprTriple {
  UserIndex user;
  ItemIndex pos;  // observed positive
  ItemIndex neg;  // sampled negative, not in the user's train set
};

double dot(std::span<const double> a, std::span<const double> b);

// log(1 + exp(x)), overflow-safe.
double softplus(double x);
double sigmoid(double x);

inline double predict_score(const ModelState& state, UserIndex u, ItemIndex i) {
  return dot(state.user_row(u), state.item_row(i));
}

// -log sigmoid(s_pos - s_neg) + weight_decay * (|p_u|^2 + |q_i|^2 + |q_j|^2)
double bpr_loss_rows(std::span<const double> user, std::span<const double> pos,
                     std::span<const double> neg, double weight_decay);
double bpr_loss(const ModelState& state, const BprTriple& triple,
                double weight_decay);

// Analytic gradient of one triple's loss with respect to its three rows.
void bpr_gradients_rows(std::span<const double> user, std::span<const double> pos,
                        std::span<const double> neg, double weight_decay,
                        std::span<double> grad_user, std::span<double> grad_pos,
                        std::span<double> grad_neg);
void bpr_gradients(const ModelState& state, const BprTriple& triple,
                   double weight_decay, std::span<double> grad_user,
                   std::span<double> grad_pos, std::span<double> grad_neg);

// Uniform over the items the user has not interacted with, by rejection.
ItemIndex sample_negative(const InteractionDataset& dataset, UserIndex u,
                          RngStream& rng);

struct EpochStats {
  double mean_plain_loss = 0.0;
  double mean_adversarial_loss = 0.0;  // perturbed-term mean; 0 for plain epochs
  std::uint64_t triple_count = 0;
};

// One pass over shuffled train pairs in minibatches. The batch objective is
// the sum of triple losses; parameters take one SGD step per batch. The
// ledger receives every triple's loss under the batch's pre-update
// parameters. Throws TrainError if parameters go non-finite.
EpochStats train_epoch_plain(ModelState& state, const InteractionDataset& dataset,
                             const RunConfig& config, RngStream& epoch_rng,
                             UserLossLedger& ledger);

// Indices of the top-k scores, descending, ties broken by ascending index.
// `excluded` must be sorted; excluded indices never appear in the result.
std::vector<ItemIndex> rank_topk(std::span<const double> scores, std::uint32_t k,
                                 std::span<const ItemIndex> excluded);

// Scores every item for the user, excludes the user's train items when
// requested and returns the top-k item list.
std::vector<ItemIndex> recommend_topk(const ModelState& state,
                                      const InteractionDataset& dataset,
                                      UserIndex u, std::uint32_t k,
                                      bool exclude_train = true);

}  // namespace advrec
