#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advrec/cf_engine.hpp"
#include "advrec/pipeline.hpp"
#include "oracles.hpp"

using namespace advrec;

namespace {

InteractionDataset tiny_dataset(std::uint32_t n_users, std::uint32_t n_items,
                                std::vector<Interaction> train) {
  InteractionDataset ds;
  ds.n_users = n_users;
  ds.n_items = n_items;
  ds.train = std::move(train);
  ds.rebuild_index();
  return ds;
}

void set_row(ModelState& state, bool item, std::uint32_t row,
             std::initializer_list<double> values) {
  auto target = item ? state.item_row(row) : state.user_row(row);
  std::size_t k = 0;
  for (double v : values) target[k++] = v;
}

InteractionDataset small_block_dataset(std::uint64_t seed) {
  auto raw = gen_synthetic(100, 80, 2, 0.1, RngStream(seed));
  auto remapped = remap_ids(raw);
  auto filtered = k_core_filter(remapped.pairs, 2);
  auto compact = compact_ids(filtered, remapped.ids);
  SplitSpec spec;
  spec.kcore = 2;
  return split_dataset(compact.pairs, compact.ids, spec, RngStream(seed + 1));
}

}  // namespace

TEST_CASE("predict_score is the dot product") {
  ModelState state(1, 3, 8);

  SUBCASE("zero user vector scores zero everywhere") {
    state.init_gaussian(RngStream(0));
    for (auto& v : state.user_factors) v = 0.0;
    for (ItemIndex i = 0; i < 3; ++i) CHECK(predict_score(state, 0, i) == 0.0);
  }

  SUBCASE("all-ones vectors score d") {
    for (auto& v : state.user_factors) v = 1.0;
    for (auto& v : state.item_factors) v = 1.0;
    CHECK(predict_score(state, 0, 1) == doctest::Approx(8.0).epsilon(1e-15));
  }

  SUBCASE("random embeddings match the naive sum") {
    state.init_gaussian(RngStream(3));
    for (ItemIndex i = 0; i < 3; ++i) {
      const double expected = oracle::naive_score(state, 0, i);
      CHECK(std::abs(predict_score(state, 0, i) - expected) < 1e-12);
    }
  }
}

TEST_CASE("bpr loss at key points") {
  ModelState state(1, 2, 2);

  SUBCASE("equal scores give ln 2") {
    set_row(state, false, 0, {0.3, 0.7});
    set_row(state, true, 0, {0.5, -0.1});
    set_row(state, true, 1, {0.5, -0.1});
    CHECK(bpr_loss(state, {0, 0, 1}, 0.0) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-12));
  }

  SUBCASE("large score gaps saturate toward zero") {
    set_row(state, false, 0, {10.0, 0.0});
    set_row(state, true, 0, {4.0, 0.0});
    set_row(state, true, 1, {0.0, 0.0});
    const double loss = bpr_loss(state, {0, 0, 1}, 0.0);
    CHECK(loss > 0.0);
    CHECK(loss < 1e-12);
  }

  SUBCASE("a gap of 2 gives -ln sigmoid(2)") {
    set_row(state, false, 0, {1.0, 0.0});
    set_row(state, true, 0, {2.0, 0.0});
    set_row(state, true, 1, {0.0, 0.0});
    CHECK(bpr_loss(state, {0, 0, 1}, 0.0) ==
          doctest::Approx(0.1269280110429725).epsilon(1e-12));
  }

  SUBCASE("weight decay adds the squared norms") {
    set_row(state, false, 0, {1.0, 0.0});
    set_row(state, true, 0, {2.0, 0.0});
    set_row(state, true, 1, {0.0, 0.0});
    const double expected = 0.1269280110429725 + 0.01 * (1.0 + 4.0 + 0.0);
    CHECK(bpr_loss(state, {0, 0, 1}, 0.01) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("analytic BPR gradients match central finite differences") {
  RngStream rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t d = 2 + static_cast<std::uint32_t>(rng.next_below(6));
    ModelState state(2, 3, d);
    state.init_gaussian(rng.fork(trial), 0.7);
    const BprTriple triple{1, 0, 2};
    const double wd = trial % 2 == 0 ? 0.0 : 0.03;

    std::vector<double> gu(d), gi(d), gj(d);
    bpr_gradients(state, triple, wd, gu, gi, gj);

    auto loss = [&] { return bpr_loss(state, triple, wd); };
    auto user_span = state.user_row(triple.user);
    std::vector<double> row(user_span.begin(), user_span.end());
    // finite differences on copies written back through the state
    auto fd_for = [&](std::span<double> target) {
      std::vector<double> tmp(target.begin(), target.end());
      auto grad = oracle::central_difference(tmp, 1e-5, [&] {
        std::copy(tmp.begin(), tmp.end(), target.begin());
        return loss();
      });
      std::copy(tmp.begin(), tmp.end(), target.begin());
      return grad;
    };
    CHECK(oracle::rel_error(gu, fd_for(state.user_row(triple.user))) < 1e-4);
    CHECK(oracle::rel_error(gi, fd_for(state.item_row(triple.pos))) < 1e-4);
    CHECK(oracle::rel_error(gj, fd_for(state.item_row(triple.neg))) < 1e-4);
  }
}

TEST_CASE("negative sampling with a single candidate is forced") {
  auto ds = tiny_dataset(1, 4, {{0, 0}, {0, 1}, {0, 3}});
  RngStream rng(9);
  for (int i = 0; i < 50; ++i) CHECK(sample_negative(ds, 0, rng) == 2);
}

TEST_CASE("negative sampling never returns a train item") {
  auto ds = tiny_dataset(2, 30, [] {
    std::vector<Interaction> train;
    for (ItemIndex i = 0; i < 30; i += 3) train.push_back({0, i});
    train.push_back({1, 0});
    return train;
  }());
  RngStream rng(10);
  for (int i = 0; i < 10000; ++i) {
    const auto u = static_cast<UserIndex>(i % 2);
    CHECK_FALSE(ds.in_train(u, sample_negative(ds, u, rng)));
  }
}

TEST_CASE("negative sampling rejects exhausted users") {
  auto ds = tiny_dataset(1, 2, {{0, 0}, {0, 1}});
  RngStream rng(2);
  CHECK_THROWS_AS(sample_negative(ds, 0, rng), DataError);
}

TEST_CASE("negative sampling is uniform over eligible items") {
  auto ds = tiny_dataset(1, 20, {{0, 3}, {0, 7}});
  RngStream rng(12);
  std::vector<std::uint32_t> counts(20, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_negative(ds, 0, rng)];
  CHECK(counts[3] == 0);
  CHECK(counts[7] == 0);
  const double p = 1.0 / 18.0;
  const double expected = draws * p;
  const double five_sigma = 5.0 * std::sqrt(draws * p * (1.0 - p));
  for (ItemIndex i = 0; i < 20; ++i) {
    if (i == 3 || i == 7) continue;
    CHECK(std::abs(counts[i] - expected) < five_sigma);
  }
}

TEST_CASE("zero learning rate leaves the state unchanged but fills the ledger") {
  auto ds = small_block_dataset(4);
  RunConfig config;
  config.d = 4;
  config.learning_rate = 0.0;
  config.batch_size = 8;
  ModelState state(ds.n_users, ds.n_items, config.d);
  state.init_gaussian(RngStream(5));
  const auto before = state;

  UserLossLedger ledger(ds.n_users);
  RngStream epoch_rng = RngStream(6).fork("epoch");
  const auto stats = train_epoch_plain(state, ds, config, epoch_rng, ledger);

  CHECK(state.user_factors == before.user_factors);
  CHECK(state.item_factors == before.item_factors);
  CHECK(stats.triple_count == ds.train.size());
  for (UserIndex u = 0; u < ds.n_users; ++u)
    CHECK(ledger.count(u) == ds.train_items_by_user[u].size());
  CHECK(ledger.global_mean() > 0.0);
}

TEST_CASE("a single-triple epoch takes the hand-derived gradient step") {
  auto ds = tiny_dataset(1, 2, {{0, 0}});
  RunConfig config;
  config.d = 2;
  config.learning_rate = 0.1;
  config.weight_decay = 0.05;
  config.batch_size = 1;

  ModelState state(1, 2, 2);
  set_row(state, false, 0, {0.3, -0.2});
  set_row(state, true, 0, {0.1, 0.4});
  set_row(state, true, 1, {-0.5, 0.2});

  UserLossLedger ledger(1);
  RngStream epoch_rng(77);
  train_epoch_plain(state, ds, config, epoch_rng, ledger);

  // hand derivation: gap = p.q0 - p.q1, slope = sigmoid(-gap),
  // dL/dp = -slope (q0 - q1) + 2 wd p, and so on
  const double p0 = 0.3, p1 = -0.2;
  const double a0 = 0.1, a1 = 0.4;    // positive item
  const double b0 = -0.5, b1 = 0.2;   // negative item
  const double gap = (p0 * a0 + p1 * a1) - (p0 * b0 + p1 * b1);
  const double slope = 1.0 / (1.0 + std::exp(gap));
  const double lr = 0.1, wd = 0.05;
  const double exp_p0 = p0 - lr * (-slope * (a0 - b0) + 2 * wd * p0);
  const double exp_p1 = p1 - lr * (-slope * (a1 - b1) + 2 * wd * p1);
  const double exp_a0 = a0 - lr * (-slope * p0 + 2 * wd * a0);
  const double exp_a1 = a1 - lr * (-slope * p1 + 2 * wd * a1);
  const double exp_b0 = b0 - lr * (slope * p0 + 2 * wd * b0);
  const double exp_b1 = b1 - lr * (slope * p1 + 2 * wd * b1);

  CHECK(state.user_row(0)[0] == doctest::Approx(exp_p0).epsilon(1e-10));
  CHECK(state.user_row(0)[1] == doctest::Approx(exp_p1).epsilon(1e-10));
  CHECK(state.item_row(0)[0] == doctest::Approx(exp_a0).epsilon(1e-10));
  CHECK(state.item_row(0)[1] == doctest::Approx(exp_a1).epsilon(1e-10));
  CHECK(state.item_row(1)[0] == doctest::Approx(exp_b0).epsilon(1e-10));
  CHECK(state.item_row(1)[1] == doctest::Approx(exp_b1).epsilon(1e-10));

  const double expected_loss =
      std::log1p(std::exp(-gap)) +
      wd * (p0 * p0 + p1 * p1 + a0 * a0 + a1 * a1 + b0 * b0 + b1 * b1);
  CHECK(ledger.epoch_mean(0) == doctest::Approx(expected_loss).epsilon(1e-12));
}

TEST_CASE("training loss decreases on block-structured data") {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ds = small_block_dataset(seed);
    RunConfig config;
    config.d = 8;
    config.learning_rate = 0.05;
    config.weight_decay = 0.0;
    config.batch_size = 16;
    ModelState state(ds.n_users, ds.n_items, config.d);
    state.init_gaussian(RngStream(seed).fork("init"));
    UserLossLedger ledger(ds.n_users);
    RngStream train_stream = RngStream(seed).fork("train");

    double first = 0.0, last = 0.0;
    for (std::uint32_t epoch = 1; epoch <= 10; ++epoch) {
      RngStream epoch_rng = train_stream.fork(epoch);
      const auto stats = train_epoch_plain(state, ds, config, epoch_rng, ledger);
      if (epoch == 1) first = stats.mean_plain_loss;
      last = stats.mean_plain_loss;
    }
    if (last < first) ++improved;
  }
  CHECK(improved >= 9);
}

TEST_CASE("ledger totals equal the recorded per-triple losses") {
  auto ds = small_block_dataset(13);
  RunConfig config;
  config.d = 4;
  config.learning_rate = 0.02;
  config.batch_size = 7;
  ModelState state(ds.n_users, ds.n_items, config.d);
  state.init_gaussian(RngStream(14));
  UserLossLedger ledger(ds.n_users);
  RngStream epoch_rng(15);
  const auto stats = train_epoch_plain(state, ds, config, epoch_rng, ledger);

  double ledger_total = 0.0;
  for (UserIndex u = 0; u < ds.n_users; ++u) ledger_total += ledger.sum_loss(u);
  const double recorded_total =
      stats.mean_plain_loss * static_cast<double>(stats.triple_count);
  CHECK(std::abs(ledger_total - recorded_total) < 1e-9);

  for (UserIndex u = 0; u < ds.n_users; ++u) {
    if (ledger.count(u) == 0) continue;
    CHECK(ledger.epoch_mean(u) ==
          doctest::Approx(ledger.sum_loss(u) / ledger.count(u)).epsilon(1e-15));
  }
}

TEST_CASE("top-k ranking breaks ties by ascending index") {
  std::vector<double> scores(10, 0.5);
  const auto top = rank_topk(scores, 4, {});
  CHECK(top == std::vector<ItemIndex>{0, 1, 2, 3});
}

TEST_CASE("top-k ranking is invariant to a constant score shift") {
  RngStream rng(31);
  std::vector<double> scores(100);
  for (auto& s : scores) s = rng.next_double();
  auto shifted = scores;
  for (auto& s : shifted) s += 3.75;
  CHECK(rank_topk(scores, 10, {}) == rank_topk(shifted, 10, {}));
}

TEST_CASE("recommendations never contain the user's train items") {
  auto inst = oracle::random_instance(RngStream(55));
  for (UserIndex u = 0; u < inst.dataset.genuine_user_count(); ++u) {
    const auto list = recommend_topk(inst.state, inst.dataset, u, 20);
    for (ItemIndex i : list) CHECK_FALSE(inst.dataset.in_train(u, i));
  }
}

TEST_CASE("recommendations match the full-sort oracle exactly") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = oracle::random_instance(RngStream(seed + 200));
    for (UserIndex u = 0; u < inst.dataset.genuine_user_count(); ++u) {
      CHECK(recommend_topk(inst.state, inst.dataset, u, 10) ==
            oracle::naive_topk(inst.state, inst.dataset, u, 10));
    }
  }
}
