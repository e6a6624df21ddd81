// Acceptance suite: one pass/fail line per criterion.
//
//  1. metric oracle equivalence        (exact, 200 randomized instances)
//  2. gradient fidelity                (finite differences, 100 instances)
//  3. perturbation norm law            (10^4 fuzzed batches)
//  4. vulnerability-weight law         (range, spot values, clamp, monotonic)
//  5. directional defense check        (desk-scale grid, 5 seeds)
//  6. diagnostic shape                 (fluctuation mode at 0, loss bins)
//  7. determinism                      (byte-identical reports, twice)
//
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "advrec/harness.hpp"
#include "oracles.hpp"

using namespace advrec;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%d] %-28s %s (%s)\n", criterion, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1

void criterion_metric_oracles() {
  Timer timer;
  std::size_t comparisons = 0, mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto inst = oracle::random_instance(RngStream(seed * 7 + 1));
    const std::uint32_t k =
        5 + static_cast<std::uint32_t>(RngStream(seed).next_below(46));
    const auto lists = rank_all_users(inst.state, inst.dataset, k);
    const auto naive_lists = oracle::naive_all_topk(inst.state, inst.dataset, k);
    if (lists.topk != naive_lists) ++mismatches;
    ++comparisons;

    if (hr_at_k(lists, inst.dataset, k).value !=
        oracle::naive_hr(naive_lists, inst.dataset, k))
      ++mismatches;
    if (ndcg_at_k(lists, inst.dataset, k).value !=
        oracle::naive_ndcg(naive_lists, inst.dataset, k))
      ++mismatches;
    if (target_hr_at_k(lists, inst.dataset, inst.targets, k) !=
        oracle::naive_t_hr(naive_lists, inst.dataset, inst.targets, k))
      ++mismatches;
    if (target_ndcg_at_k(lists, inst.dataset, inst.targets, k) !=
        oracle::naive_t_ndcg(naive_lists, inst.dataset, inst.targets, k))
      ++mismatches;
    comparisons += 4;

    const auto statuses = attack_status_all(lists, inst.dataset, inst.targets, k);
    for (UserIndex u = 0; u < statuses.size(); ++u) {
      if (statuses[u] != oracle::naive_status(naive_lists[u], inst.targets, k))
        ++mismatches;
      ++comparisons;
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "200 instances, %zu comparisons, %zu mismatches, %.1fs",
                comparisons, mismatches, timer.seconds());
  report(1, "metric-oracle-equivalence", mismatches == 0 && timer.seconds() < 60,
         detail);
}

// ---------------------------------------------------------------- criterion 2

void criterion_gradient_fidelity() {
  Timer timer;
  std::size_t checks = 0;
  double worst = 0.0;
  RngStream rng(97);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t d = 2 + static_cast<std::uint32_t>(rng.next_below(7));
    const std::uint32_t n_users = 2 + static_cast<std::uint32_t>(rng.next_below(4));
    const std::uint32_t n_items = 3 + static_cast<std::uint32_t>(rng.next_below(5));
    ModelState state(n_users, n_items, d);
    state.init_gaussian(rng.fork(trial), 0.6);
    const auto pos = static_cast<ItemIndex>(rng.next_below(n_items));
    auto neg = static_cast<ItemIndex>(rng.next_below(n_items));
    if (neg == pos) neg = (neg + 1) % n_items;
    const BprTriple triple{static_cast<UserIndex>(rng.next_below(n_users)), pos,
                           neg};
    const double wd = trial % 3 == 0 ? 0.0 : 0.02;

    // analytic triple gradients vs central differences
    std::vector<double> gu(d), gi(d), gj(d);
    bpr_gradients(state, triple, wd, gu, gi, gj);
    auto fd_row = [&](std::span<double> target) {
      std::vector<double> keep(target.begin(), target.end());
      auto grad = oracle::central_difference(keep, 1e-5, [&] {
        std::copy(keep.begin(), keep.end(), target.begin());
        return bpr_loss(state, triple, wd);
      });
      std::copy(keep.begin(), keep.end(), target.begin());
      return grad;
    };
    worst = std::max(worst,
                     oracle::rel_error(gu, fd_row(state.user_row(triple.user))));
    worst = std::max(worst,
                     oracle::rel_error(gi, fd_row(state.item_row(triple.pos))));
    worst = std::max(worst,
                     oracle::rel_error(gj, fd_row(state.item_row(triple.neg))));
    checks += 3;

    // perturbation directions: unit ascent vectors vs normalized differences
    const std::vector<BprTriple> batch = {triple};
    const auto delta = compute_perturbation(state, batch, {1.0}, wd);
    auto check_direction = [&](const std::vector<double>& unit,
                               std::span<double> target) {
      std::vector<double> keep(target.begin(), target.end());
      auto fd = oracle::central_difference(keep, 1e-5, [&] {
        std::copy(keep.begin(), keep.end(), target.begin());
        return bpr_loss(state, triple, wd);
      });
      std::copy(keep.begin(), keep.end(), target.begin());
      double norm = 0.0;
      for (double v : fd) norm += v * v;
      norm = std::sqrt(norm);
      if (norm < 1e-6) return;  // degenerate direction, covered by criterion 3
      for (auto& v : fd) v /= norm;
      worst = std::max(worst, oracle::rel_error(unit, fd));
      ++checks;
    };
    check_direction(delta.delta_user[0], state.user_row(triple.user));
    check_direction(delta.delta_pos[0], state.item_row(triple.pos));
    check_direction(delta.delta_neg[0], state.item_row(triple.neg));
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "100 instances, %zu gradients, worst rel err %.2e, %.1fs",
                checks, worst, timer.seconds());
  report(2, "gradient-fidelity", worst < 1e-4 && timer.seconds() < 60, detail);
}

// ---------------------------------------------------------------- criterion 3

void criterion_norm_law() {
  Timer timer;
  RngStream rng(131);
  std::size_t rows = 0, violations = 0;
  for (int batch_no = 0; batch_no < 10000; ++batch_no) {
    const std::uint32_t d = 2 + static_cast<std::uint32_t>(rng.next_below(7));
    const std::uint32_t n_users = 1 + static_cast<std::uint32_t>(rng.next_below(6));
    const std::uint32_t n_items = 2 + static_cast<std::uint32_t>(rng.next_below(7));
    ModelState state(n_users, n_items, d);
    state.init_gaussian(rng.fork(batch_no), 0.5);

    const bool uniform = batch_no % 2 == 0;  // alternate the APR and VAT laws
    const double epsilon = 0.05 + rng.next_double();
    const double rho = 0.05 + rng.next_double();
    std::vector<double> g(n_users);
    const double mean_loss = 0.3 + rng.next_double();
    for (auto& v : g)
      v = vulnerability_weight(2.0 * mean_loss * rng.next_double(), mean_loss,
                               GVariant::kLiteral, 6.0);

    std::vector<BprTriple> batch;
    std::vector<double> magnitudes;
    const auto n = 1 + rng.next_below(8);
    for (std::uint64_t t = 0; t < n; ++t) {
      const auto u = static_cast<UserIndex>(rng.next_below(n_users));
      const auto pos = static_cast<ItemIndex>(rng.next_below(n_items));
      auto neg = static_cast<ItemIndex>(rng.next_below(n_items));
      if (neg == pos) neg = (neg + 1) % n_items;
      batch.push_back({u, pos, neg});
      magnitudes.push_back(uniform ? epsilon : rho * g[u]);
    }
    const double wd = batch_no % 3 == 0 ? 0.0 : 0.01;
    const auto delta = compute_perturbation(state, batch, magnitudes, wd);
    for (std::size_t t = 0; t < batch.size(); ++t) {
      for (const auto* row :
           {&delta.delta_user[t], &delta.delta_pos[t], &delta.delta_neg[t]}) {
        double norm = 0.0;
        for (double v : *row) norm += v * v;
        norm = std::sqrt(norm);
        ++rows;
        if (norm == 0.0) {
          if (norm > magnitudes[t] + 1e-9) ++violations;
        } else if (std::abs(norm - magnitudes[t]) > 1e-9) {
          ++violations;
        }
      }
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "10000 batches, %zu rows, %zu violations, %.1fs", rows,
                violations, timer.seconds());
  report(3, "perturbation-norm-law", violations == 0, detail);
}

// ---------------------------------------------------------------- criterion 4

void criterion_g_law() {
  Timer timer;
  bool pass = true;
  std::string reason = "all laws hold";
  auto fail = [&](const std::string& why) {
    if (pass) reason = why;
    pass = false;
  };

  const double c = 6.0;
  const auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  // range law, every variant
  RngStream rng(151);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mean = 0.05 + 3.0 * rng.next_double();
    const double loss = 4.0 * mean * rng.next_double();
    for (auto variant : {GVariant::kLiteral, GVariant::kNegatedReciprocal,
                         GVariant::kNegatedRelative}) {
      const double g = vulnerability_weight(loss, mean, variant, c);
      if (!(g > 0.0 && g < 1.0)) fail("weight escaped (0,1)");
    }
  }

  // sigmoid spot values at delta = +-1 (literal: argument 1/delta)
  if (std::abs(vulnerability_weight(2.0, 1.0, GVariant::kLiteral, c) -
               0.7310585786300049) > 1e-6)
    fail("sigma(1) spot value");
  if (std::abs(vulnerability_weight(0.0, 1.0, GVariant::kLiteral, c) -
               0.2689414213699951) > 1e-6)
    fail("sigma(-1) spot value");

  // clamp behavior as delta -> 0: one-sided limits and the at-mean rule
  if (std::abs(vulnerability_weight(1.0 + 1e-12, 1.0, GVariant::kLiteral, c) -
               sigma(c)) > 1e-9)
    fail("literal clamp from above");
  if (std::abs(vulnerability_weight(1.0 - 1e-12, 1.0, GVariant::kLiteral, c) -
               sigma(-c)) > 1e-9)
    fail("literal clamp from below");
  if (std::abs(vulnerability_weight(1.0, 1.0, GVariant::kLiteral, c) - sigma(c)) >
      1e-12)
    fail("literal at-mean rule");
  if (std::abs(vulnerability_weight(1.0, 1.0, GVariant::kNegatedReciprocal, c) -
               sigma(-c)) > 1e-12)
    fail("negated_reciprocal at-mean rule");
  if (vulnerability_weight(1.0, 1.0, GVariant::kNegatedRelative, c) != 0.5)
    fail("negated_relative at-mean value");

  // negated_relative decreasing over 1e3 random pairs (strict below the
  // clamp knee at loss = mean * (1 + c), weak beyond it)
  RngStream pair_rng(157);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mean = 0.2 + 2.0 * pair_rng.next_double();
    double a = (1.0 + c) * 0.99 * mean * pair_rng.next_double();
    double b = (1.0 + c) * 0.99 * mean * pair_rng.next_double();
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (vulnerability_weight(a, mean, GVariant::kNegatedRelative, c) <=
        vulnerability_weight(b, mean, GVariant::kNegatedRelative, c))
      fail("negated_relative not strictly decreasing");
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double mean = 1.0;
    double a = 20.0 * pair_rng.next_double();
    double b = 20.0 * pair_rng.next_double();
    if (a > b) std::swap(a, b);
    if (vulnerability_weight(a, mean, GVariant::kNegatedRelative, c) <
        vulnerability_weight(b, mean, GVariant::kNegatedRelative, c))
      fail("negated_relative not weakly decreasing");
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail), "%s, %.1fs", reason.c_str(),
                timer.seconds());
  report(4, "vulnerability-weight-law", pass, detail);
}

// ------------------------------------------------------------ criteria 5 & 6

struct DefenseCell {
  std::string label;
  Defense defense;
  GVariant variant;
};

void criteria_directional_and_diagnostics() {
  Timer timer;
  ExperimentPlan plan;  // bench defaults: 2000 x 1500, d=32, 100 epochs

  const std::vector<DefenseCell> defense_cells = {
      {"undefended", Defense::kNone, GVariant::kLiteral},
      {"apr", Defense::kApr, GVariant::kLiteral},
      {"vat/literal", Defense::kVat, GVariant::kLiteral},
      {"vat/negated_reciprocal", Defense::kVat, GVariant::kNegatedReciprocal},
      {"vat/negated_relative", Defense::kVat, GVariant::kNegatedRelative},
  };
  std::map<std::string, std::vector<CheckpointMetrics>> finals;
  std::vector<TrainOutput> undefended_runs;  // for criterion 6

  for (const auto seed : plan.seeds) {
    auto ctx = prepare_seed(plan, seed);
    RngStream root(seed);
    auto profiles = gen_random_attack(ctx.dataset, ctx.targets, plan.attack,
                                      root.fork("attack").fork("random"));
    const auto poisoned = inject_profiles(ctx.dataset, profiles);

    for (const auto& cell : defense_cells) {
      RunConfig config = plan.train;  // rho 0.6, lambda 1.0, epsilon 0.6
      config.seed = seed;
      config.defense = cell.defense;
      config.g_variant = cell.variant;
      auto trained =
          run_training(poisoned, ctx.targets, config, root.fork("model"));
      finals[cell.label].push_back(trained.checkpoints.back());
      if (cell.defense == Defense::kNone)
        undefended_runs.push_back(std::move(trained));
    }
  }

  auto mean_of = [&](const std::string& label, auto field) {
    double total = 0.0;
    for (const auto& cp : finals.at(label)) total += field(cp);
    return total / static_cast<double>(finals.at(label).size());
  };
  auto t_hr = [](const CheckpointMetrics& cp) { return cp.t_hr; };
  auto hr = [](const CheckpointMetrics& cp) { return cp.hr; };

  const double undef_t_hr = mean_of("undefended", t_hr);
  const double undef_hr = mean_of("undefended", hr);
  const double apr_t_hr = mean_of("apr", t_hr);
  const double apr_hr = mean_of("apr", hr);

  std::printf("    %-26s %-12s %-12s\n", "cell", "T-HR@50", "HR@20");
  std::printf("    %-26s %-12.5f %-12.5f\n", "undefended", undef_t_hr, undef_hr);
  std::printf("    %-26s %-12.5f %-12.5f\n", "apr (eps=0.6)", apr_t_hr, apr_hr);

  bool some_variant_passes = false;
  for (const auto& cell : defense_cells) {
    if (cell.defense != Defense::kVat) continue;
    const double vat_t_hr = mean_of(cell.label, t_hr);
    const double vat_hr = mean_of(cell.label, hr);
    const bool reduces = vat_t_hr <= undef_t_hr;
    const bool preserves = vat_hr >= 0.95 * undef_hr;
    some_variant_passes = some_variant_passes || (reduces && preserves);
    std::printf("    %-26s %-12.5f %-12.5f vs apr: %+0.5f T-HR, %+0.5f HR%s\n",
                cell.label.c_str(), vat_t_hr, vat_hr, vat_t_hr - apr_t_hr,
                vat_hr - apr_hr,
                reduces && preserves ? "" : "  [not directional]");
  }

  const bool attack_landed = undef_t_hr > 0.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "undefended T-HR@50 %.5f %s 0; %s; %.0fs (budget 1800s)",
                undef_t_hr, attack_landed ? ">" : "=",
                some_variant_passes ? "a VAT variant reduces T-HR at >=95% HR"
                                    : "no VAT variant is directional",
                timer.seconds());
  report(5, "directional-defense-check",
         attack_landed && some_variant_passes && timer.seconds() < 1800, detail);

  // criterion 6: diagnostics on the undefended attacked runs
  bool mode_at_zero = true;
  for (const auto& run : undefended_runs) {
    const auto fluct = fluctuation_report(run.statuses);
    const auto& histogram = fluct.affected_count_histogram;
    for (std::size_t c = 1; c < histogram.size(); ++c)
      if (histogram[c] >= histogram[0]) mode_at_zero = false;
  }

  bool bins_well_formed = true;
  const auto& probe = undefended_runs.front();
  const auto bins =
      loss_bin_report(probe.ledger, probe.statuses.affected.back(), 20);
  if (bins.size() != 20) bins_well_formed = false;
  std::uint32_t binned_users = 0;
  std::uint32_t flagged = 0;
  for (const auto& bin : bins) {
    binned_users += bin.n_users;
    if (bin.n_affected > bin.n_users) bins_well_formed = false;
    if (bin.n_users > 0 &&
        std::abs(bin.affected_fraction -
                 static_cast<double>(bin.n_affected) / bin.n_users) > 1e-12)
      bins_well_formed = false;
    if (bin.upper < bin.lower) bins_well_formed = false;
    const bool should_flag =
        bin.n_users <
        0.005 * static_cast<double>(probe.statuses.affected.back().size());
    if (bin.below_visibility_threshold != should_flag) bins_well_formed = false;
    if (bin.below_visibility_threshold) ++flagged;
  }
  if (binned_users != probe.statuses.affected.back().size())
    bins_well_formed = false;

  char detail6[200];
  std::snprintf(detail6, sizeof(detail6),
                "mode at 0 in %zu/%zu runs; 20 bins cover %u users, %u flagged "
                "by the 0.5%% rule",
                undefended_runs.size(), undefended_runs.size(), binned_users,
                flagged);
  report(6, "diagnostic-shape", mode_at_zero && bins_well_formed, detail6);
}

// ---------------------------------------------------------------- criterion 7

void criterion_determinism() {
  Timer timer;
  ExperimentPlan plan;
  plan.dataset.synthetic = {120, 90, 3, 0.1, 9.0};
  plan.split.kcore = 3;
  plan.targets.count = 2;
  plan.targets.popularity_cap = 0.1;
  plan.attack.budget_fraction = 0.05;
  plan.attack.profile_size = 8;
  plan.train.d = 8;
  plan.train.epochs = 10;
  plan.train.warmup_epochs = 2;
  plan.train.eval_every = 5;
  plan.train.batch_size = 16;
  plan.attacks = {AttackKind::kRandom};
  plan.defenses = {Defense::kNone, Defense::kVat};
  plan.seeds = {0, 1};

  auto run_tree = [&](const std::string& dir) {
    fs::remove_all(dir);
    auto local = plan;
    local.out_dir = dir;
    const auto result = run_experiment(local);
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      files[fs::relative(entry.path(), dir).string()] =
          read_file(entry.path().string());
    }
    fs::remove_all(dir);
    return std::pair{result.failures.size(), files};
  };

  const auto base = fs::temp_directory_path() / "advrec-acceptance";
  const auto [failures_a, tree_a] = run_tree((base / "a").string());
  const auto [failures_b, tree_b] = run_tree((base / "b").string());

  std::size_t differing = 0;
  for (const auto& [rel, content] : tree_a) {
    const auto it = tree_b.find(rel);
    if (it == tree_b.end() || it->second != content) ++differing;
  }
  const bool pass = failures_a == 0 && failures_b == 0 && differing == 0 &&
                    tree_a.size() == tree_b.size() && !tree_a.empty();
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%zu files per run, %zu differ between runs, %.1fs",
                tree_a.size(), differing, timer.seconds());
  report(7, "determinism", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_metric_oracles();
  criterion_gradient_fidelity();
  criterion_norm_law();
  criterion_g_law();
  criteria_directional_and_diagnostics();
  criterion_determinism();
  std::printf("%s (%d failed)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures;
}
