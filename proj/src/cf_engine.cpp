#include "advrec/cf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epoch_impl.hpp"

namespace advrec {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bpr_loss_rows(std::span<const double> user, std::span<const double> pos,
                     std::span<const double> neg, double weight_decay) {
  const double gap = dot(user, pos) - dot(user, neg);
  double loss = softplus(-gap);
  if (weight_decay != 0.0)
    loss += weight_decay * (dot(user, user) + dot(pos, pos) + dot(neg, neg));
  return loss;
}

double bpr_loss(const ModelState& state, const BprTriple& triple,
                double weight_decay) {
  return bpr_loss_rows(state.user_row(triple.user), state.item_row(triple.pos),
                       state.item_row(triple.neg), weight_decay);
}

void bpr_gradients_rows(std::span<const double> user, std::span<const double> pos,
                        std::span<const double> neg, double weight_decay,
                        std::span<double> grad_user, std::span<double> grad_pos,
                        std::span<double> grad_neg) {
  const double gap = dot(user, pos) - dot(user, neg);
  const double slope = sigmoid(-gap);  // d softplus(-gap) / d gap = -slope
  for (std::size_t k = 0; k < user.size(); ++k) {
    grad_user[k] = -slope * (pos[k] - neg[k]) + 2.0 * weight_decay * user[k];
    grad_pos[k] = -slope * user[k] + 2.0 * weight_decay * pos[k];
    grad_neg[k] = slope * user[k] + 2.0 * weight_decay * neg[k];
  }
}

void bpr_gradients(const ModelState& state, const BprTriple& triple,
                   double weight_decay, std::span<double> grad_user,
                   std::span<double> grad_pos, std::span<double> grad_neg) {
  bpr_gradients_rows(state.user_row(triple.user), state.item_row(triple.pos),
                     state.item_row(triple.neg), weight_decay, grad_user,
                     grad_pos, grad_neg);
}

ItemIndex sample_negative(const InteractionDataset& dataset, UserIndex u,
                          RngStream& rng) {
  if (dataset.train_items_by_user[u].size() >= dataset.n_items)
    throw DataError("user has interacted with every item; no negative exists");
  for (;;) {
    const auto j = static_cast<ItemIndex>(rng.next_below(dataset.n_items));
    if (!dataset.in_train(u, j)) return j;
  }
}

EpochStats train_epoch_plain(ModelState& state, const InteractionDataset& dataset,
                             const RunConfig& config, RngStream& epoch_rng,
                             UserLossLedger& ledger) {
  return detail::run_epoch(state, dataset, config, epoch_rng, ledger, nullptr,
                           /*adversarial=*/false);
}

std::vector<ItemIndex> rank_topk(std::span<const double> scores, std::uint32_t k,
                                 std::span<const ItemIndex> excluded) {
  std::vector<ItemIndex> candidates;
  candidates.reserve(scores.size());
  std::size_t e = 0;
  for (ItemIndex i = 0; i < scores.size(); ++i) {
    while (e < excluded.size() && excluded[e] < i) ++e;
    if (e < excluded.size() && excluded[e] == i) continue;
    candidates.push_back(i);
  }
  const auto take = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end(), [&](ItemIndex a, ItemIndex b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  candidates.resize(take);
  return candidates;
}

std::vector<ItemIndex> recommend_topk(const ModelState& state,
                                      const InteractionDataset& dataset,
                                      UserIndex u, std::uint32_t k,
                                      bool exclude_train) {
  std::vector<double> scores(dataset.n_items);
  const auto pu = state.user_row(u);
  for (ItemIndex i = 0; i < dataset.n_items; ++i)
    scores[i] = dot(pu, state.item_row(i));
  static const std::vector<ItemIndex> kNoExclusion;
  const auto& excluded =
      exclude_train ? dataset.train_items_by_user[u] : kNoExclusion;
  return rank_topk(scores, k, excluded);
}

}  // namespace advrec
