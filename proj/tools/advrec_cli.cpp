// advrec: train, poison, defend and measure implicit-feedback recommenders.
//
// Subcommands: prepare, attack, train, eval, analyze, run, report.
// Exit codes: 0 ok, 1 runtime/cell failures, 2 invalid configuration.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advrec/harness.hpp"
#include "advrec/toml.hpp"

namespace fs = std::filesystem;
using namespace advrec;

namespace {

std::string default_out_root() {
  if (const char* env = std::getenv("ADVREC_OUT")) return env;
  return "runs";
}

RngStream seed_root(std::uint64_t seed) { return RngStream(seed); }

struct PrepareArgs {
  std::string input;
  bool synthetic = false;
  SyntheticSpec synth;
  SplitSpec split;
  std::uint32_t n_targets = 5;
  double target_cap = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_prepare(const PrepareArgs& args) {
  if (args.input.empty() == !args.synthetic)
    throw ConfigError("pass exactly one of --input or --synthetic");
  args.split.validate();

  std::vector<RawPair> raw;
  if (args.synthetic) {
    raw = gen_synthetic(args.synth.users, args.synth.items, args.synth.blocks,
                        args.synth.density, seed_root(args.seed).fork("synthetic"),
                        args.synth.affinity);
  } else {
    raw = load_interactions_file(args.input);
  }
  auto dataset =
      prepare_dataset(raw, args.split, seed_root(args.seed).fork("pipeline"));
  auto targets = select_targets(dataset, args.n_targets, args.target_cap,
                                seed_root(args.seed).fork("targets"));
  write_prepared_dataset(args.out, dataset, targets, args.seed, args.split);
  std::cout << "prepared " << dataset.n_users << " users x " << dataset.n_items
            << " items (" << dataset.train.size() << " train / "
            << dataset.test.size() << " test pairs) -> " << args.out << "\n";
  return 0;
}

struct AttackArgs {
  std::string data;
  std::string type = "random";
  AttackConfig config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_attack(const AttackArgs& args) {
  const auto kind = attack_from_string(args.type);
  if (kind == AttackKind::kNone)
    throw ConfigError("attack type must be random or bandwagon");
  auto prepared = load_prepared_dataset(args.data);
  const auto seed = args.seed.value_or(prepared.seed);
  RngStream rng = seed_root(seed).fork("attack").fork(to_string(kind));
  auto profiles =
      kind == AttackKind::kRandom
          ? gen_random_attack(prepared.dataset, prepared.targets, args.config, rng)
          : gen_bandwagon_attack(prepared.dataset, prepared.targets, args.config,
                                 rng);
  auto poisoned = inject_profiles(prepared.dataset, profiles);
  const auto out =
      args.out.empty() ? (fs::path(args.data) / "fake_profiles.json").string()
                       : args.out;
  write_file(out, fake_profiles_json(profiles, poisoned, prepared.targets));
  std::cout << "generated " << profiles.size() << " fake profiles ("
            << to_string(kind) << ") -> " << out << "\n";
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string profiles;
  RunConfig config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_train(const TrainArgs& args) {
  auto prepared = load_prepared_dataset(args.data);
  RunConfig config = args.config;
  config.seed = args.seed.value_or(prepared.seed);
  config.validate();

  InteractionDataset working = prepared.dataset;
  if (!args.profiles.empty()) {
    auto profiles =
        fake_profiles_from_json(read_file(args.profiles), prepared.dataset);
    working = inject_profiles(prepared.dataset, profiles);
  }

  auto trained = run_training(working, prepared.targets, config,
                              seed_root(config.seed).fork("model"));

  fs::create_directories(args.out);
  save_checkpoint(trained.state, config.seed, config.epochs,
                  (fs::path(args.out) / "checkpoint.bin").string());
  write_file((fs::path(args.out) / "diagnostics.jsonl").string(),
             trained.diagnostics_jsonl);
  write_file((fs::path(args.out) / "statuses.csv").string(),
             status_series_csv(trained.statuses));
  {
    std::ostringstream out;
    out << "user,mean_loss\n";
    for (UserIndex u = 0; u < working.genuine_user_count(); ++u) {
      if (!trained.ledger.has_snapshot(u)) continue;
      out << u << ',' << format_double(trained.ledger.epoch_mean(u)) << "\n";
    }
    write_file((fs::path(args.out) / "user_loss.csv").string(), out.str());
  }
  {
    std::ostringstream out;
    out << "epoch,hr@" << config.k_rec << ",ndcg@" << config.k_rec << ",t_hr@"
        << config.k_target << ",t_ndcg@" << config.k_target << "\n";
    for (const auto& cp : trained.checkpoints)
      out << cp.epoch << ',' << format_double(cp.hr) << ','
          << format_double(cp.ndcg) << ',' << format_double(cp.t_hr) << ','
          << format_double(cp.t_ndcg) << "\n";
    write_file((fs::path(args.out) / "checkpoints.csv").string(), out.str());
  }
  const auto& final_cp = trained.checkpoints.back();
  std::cout << "trained " << config.epochs << " epochs (defense "
            << to_string(config.defense) << "); final HR@" << config.k_rec
            << " = " << format_double(final_cp.hr) << ", T-HR@"
            << config.k_target << " = " << format_double(final_cp.t_hr)
            << " -> " << args.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string data;
  std::string checkpoint;
  std::string profiles;
  std::uint32_t k_rec = 20;
  std::uint32_t k_target = 50;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  auto prepared = load_prepared_dataset(args.data);
  InteractionDataset working = prepared.dataset;
  if (!args.profiles.empty()) {
    auto profiles =
        fake_profiles_from_json(read_file(args.profiles), prepared.dataset);
    working = inject_profiles(prepared.dataset, profiles);
  }
  ModelState state;
  const auto info = load_checkpoint(state, args.checkpoint);
  if (state.n_users != working.n_users || state.n_items != working.n_items)
    throw ConfigError(
        "checkpoint shape does not match the dataset; pass the matching "
        "--profiles used at training time");

  const auto lists =
      rank_all_users(state, working, std::max(args.k_rec, args.k_target));
  MetricTable table;
  table.k_rec = args.k_rec;
  table.k_target = args.k_target;
  MetricRow row;
  row.attack = args.profiles.empty() ? "none" : "injected";
  row.defense = "-";
  row.g_variant = "-";
  row.seed = info.seed;
  row.hr = hr_at_k(lists, working, args.k_rec).value;
  row.ndcg = ndcg_at_k(lists, working, args.k_rec).value;
  row.t_hr = target_hr_at_k(lists, working, prepared.targets, args.k_target);
  row.t_ndcg = target_ndcg_at_k(lists, working, prepared.targets, args.k_target);
  table.rows.push_back(row);

  fs::create_directories(args.out);
  write_file((fs::path(args.out) / "metrics.csv").string(),
             metric_table_csv(table));
  write_file((fs::path(args.out) / "metrics.json").string(),
             metric_table_json(table));
  std::cout << metric_table_csv(table);
  return 0;
}

struct AnalyzeArgs {
  std::string train_dir;
  std::uint32_t bins = 20;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const auto status_csv =
      read_file((fs::path(args.train_dir) / "statuses.csv").string());
  const auto loss_csv =
      read_file((fs::path(args.train_dir) / "user_loss.csv").string());

  // user count = rows in the first checkpoint block
  std::uint32_t n_users = 0;
  {
    std::istringstream in(status_csv);
    std::string line;
    std::getline(in, line);  // header
    std::string first_epoch;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      const auto epoch = line.substr(0, comma);
      if (first_epoch.empty()) first_epoch = epoch;
      if (epoch != first_epoch) break;
      ++n_users;
    }
  }
  if (n_users == 0) throw IoError("no statuses found in " + args.train_dir);
  const auto series = status_series_from_csv(status_csv, n_users);

  std::map<UserIndex, double> loss_by_user;
  {
    std::istringstream in(loss_csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      loss_by_user[static_cast<UserIndex>(std::stoul(line.substr(0, comma)))] =
          parse_double(line.substr(comma + 1));
    }
  }
  std::vector<double> losses;
  std::vector<bool> flags;
  const auto& last = series.affected.back();
  for (const auto& [user, loss] : loss_by_user) {
    if (user >= last.size()) continue;
    losses.push_back(loss);
    flags.push_back(last[user]);
  }

  fs::create_directories(args.out);
  write_file((fs::path(args.out) / "fluctuation.csv").string(),
             fluctuation_csv(fluctuation_report(series)));
  write_file((fs::path(args.out) / "loss_bins.csv").string(),
             loss_bins_csv(loss_bin_report(losses, flags, args.bins)));
  std::cout << "analyzed " << series.affected.size() << " checkpoints over "
            << n_users << " users -> " << args.out << "\n";
  return 0;
}

struct RunArgs {
  std::string config_path;
  std::string seeds;
  std::string attack;
  std::string defense;
  std::string g_variant;
  std::optional<double> rho, lambda, epsilon;
  std::string out;
  std::optional<std::uint32_t> jobs;
};

int cmd_run(const RunArgs& args) {
  ExperimentPlan plan;
  if (!args.config_path.empty()) {
    plan = plan_from_toml_file(args.config_path);
  } else {
    plan.out_dir = default_out_root();
  }
  if (!args.seeds.empty()) {
    plan.seeds.clear();
    std::istringstream in(args.seeds);
    std::string token;
    while (std::getline(in, token, ','))
      if (!token.empty()) plan.seeds.push_back(std::stoull(token));
  }
  if (!args.attack.empty()) plan.attacks = {attack_from_string(args.attack)};
  if (!args.defense.empty()) plan.defenses = {defense_from_string(args.defense)};
  if (!args.g_variant.empty())
    plan.train.g_variant = g_variant_from_string(args.g_variant);
  if (args.rho) plan.train.rho = *args.rho;
  if (args.lambda) plan.train.lambda = *args.lambda;
  if (args.epsilon) plan.train.epsilon = *args.epsilon;
  if (!args.out.empty()) plan.out_dir = args.out;
  if (args.jobs) plan.jobs = *args.jobs;
  plan.validate();

  const auto report = run_experiment(plan);
  std::cout << metric_table_csv(report.table);
  for (const auto& failure : report.failures)
    std::cerr << "cell failed: " << failure << "\n";
  std::cout << "report written to " << plan.out_dir << "\n";
  return report.failures.empty() ? 0 : 1;
}

struct ReportArgs {
  std::string runs;
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  std::vector<fs::path> cell_dirs;
  const auto cells_root = fs::path(args.runs) / "cells";
  if (!fs::exists(cells_root))
    throw ConfigError("no cells/ directory under " + args.runs);
  for (const auto& entry : fs::directory_iterator(cells_root))
    if (entry.is_directory()) cell_dirs.push_back(entry.path());
  std::sort(cell_dirs.begin(), cell_dirs.end());

  MetricTable table;
  bool first = true;
  for (const auto& dir : cell_dirs) {
    const auto metrics_path = dir / "metrics.csv";
    if (!fs::exists(metrics_path)) continue;
    auto cell = metric_table_from_csv(read_file(metrics_path.string()));
    if (first) {
      table.k_rec = cell.k_rec;
      table.k_target = cell.k_target;
      first = false;
    }
    for (auto& row : cell.rows) table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw ConfigError("no cell metrics under " + args.runs);

  const auto out = args.out.empty() ? args.runs : args.out;
  fs::create_directories(out);
  write_file((fs::path(out) / "report.csv").string(), metric_table_csv(table));
  write_file((fs::path(out) / "report.json").string(), metric_table_json(table));
  std::cout << "aggregated " << table.rows.size() << " rows -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for shilling attacks and adversarial-training "
               "defenses on implicit-feedback matrix factorization"};
  app.require_subcommand(1);

  PrepareArgs prepare;
  auto* prep = app.add_subcommand("prepare", "ingest or synthesize a dataset, "
                                             "filter, split and pick targets");
  prep->add_option("--input", prepare.input, "interaction file (user,item per line)");
  prep->add_flag("--synthetic", prepare.synthetic, "generate block-structured data");
  prep->add_option("--users", prepare.synth.users, "synthetic user count");
  prep->add_option("--items", prepare.synth.items, "synthetic item count");
  prep->add_option("--blocks", prepare.synth.blocks, "synthetic block count");
  prep->add_option("--density", prepare.synth.density, "synthetic density");
  prep->add_option("--affinity", prepare.synth.affinity, "in-block affinity");
  prep->add_option("--kcore", prepare.split.kcore, "minimum interactions");
  prep->add_option("--train-fraction", prepare.split.train_fraction, "");
  prep->add_option("--val-fraction", prepare.split.validation_fraction_of_train, "");
  prep->add_option("--targets", prepare.n_targets, "number of target items");
  prep->add_option("--target-cap", prepare.target_cap, "popularity percentile cap");
  prep->add_option("--seed", prepare.seed, "seed");
  prep->add_option("--out", prepare.out, "output directory")->required();

  AttackArgs attack;
  auto* atk = app.add_subcommand("attack", "generate fake-user profiles");
  atk->add_option("--data", attack.data, "prepared dataset directory")->required();
  atk->add_option("--type", attack.type, "random|bandwagon");
  atk->add_option("--budget", attack.config.budget_fraction, "fake users per genuine user");
  atk->add_option("--profile-size", attack.config.profile_size,
                  "interactions per fake user (0 = mean genuine count)");
  atk->add_option("--popular-pool", attack.config.popular_pool_fraction,
                  "bandwagon popular pool fraction");
  atk->add_option("--popular-frac", attack.config.selected_fraction_popular,
                  "bandwagon popular filler fraction");
  std::uint64_t attack_seed = 0;
  auto* atk_seed = atk->add_option("--seed", attack_seed, "seed (default: split seed)");
  atk->add_option("--out", attack.out, "profile manifest path");

  TrainArgs train;
  auto* trn = app.add_subcommand("train", "train a model, optionally poisoned "
                                          "and defended");
  trn->add_option("--data", train.data, "prepared dataset directory")->required();
  trn->add_option("--profiles", train.profiles, "fake-profile manifest to inject");
  std::string train_defense = "none", train_variant = "literal";
  trn->add_option("--defense", train_defense, "none|apr|vat");
  trn->add_option("--g-variant", train_variant,
                  "literal|negated_reciprocal|negated_relative");
  trn->add_option("--d", train.config.d, "embedding dimension");
  trn->add_option("--lr", train.config.learning_rate, "learning rate");
  trn->add_option("--weight-decay", train.config.weight_decay, "L2 penalty");
  trn->add_option("--epochs", train.config.epochs, "total epochs");
  trn->add_option("--warmup", train.config.warmup_epochs, "plain epochs first");
  trn->add_option("--batch-size", train.config.batch_size, "");
  trn->add_option("--eval-every", train.config.eval_every, "checkpoint cadence");
  trn->add_option("--k-rec", train.config.k_rec, "");
  trn->add_option("--k-target", train.config.k_target, "");
  trn->add_option("--epsilon", train.config.epsilon, "APR magnitude");
  trn->add_option("--rho", train.config.rho, "VAT base magnitude");
  trn->add_option("--lambda", train.config.lambda, "adversarial weight");
  trn->add_option("--clamp", train.config.clamp_c, "g sigmoid-argument clamp");
  std::uint64_t train_seed = 0;
  auto* trn_seed = trn->add_option("--seed", train_seed, "seed (default: split seed)");
  trn->add_option("--out", train.out, "output directory")->required();

  EvalArgs eval;
  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint");
  evl->add_option("--data", eval.data, "prepared dataset directory")->required();
  evl->add_option("--checkpoint", eval.checkpoint, "checkpoint file")->required();
  evl->add_option("--profiles", eval.profiles, "profiles injected at train time");
  evl->add_option("--k-rec", eval.k_rec, "");
  evl->add_option("--k-target", eval.k_target, "");
  evl->add_option("--out", eval.out, "output directory")->required();

  AnalyzeArgs analyze;
  auto* anl = app.add_subcommand("analyze", "loss-bin and fluctuation reports "
                                            "from a training directory");
  anl->add_option("--train-dir", analyze.train_dir, "train output directory")
      ->required();
  anl->add_option("--bins", analyze.bins, "loss bin count");
  anl->add_option("--out", analyze.out, "output directory")->required();

  RunArgs run;
  auto* rn = app.add_subcommand("run", "run the full experiment grid");
  rn->add_option("--config", run.config_path, "plan file (TOML)");
  rn->add_option("--seeds", run.seeds, "comma-separated seed list");
  rn->add_option("--attack", run.attack, "restrict to one attack");
  rn->add_option("--defense", run.defense, "restrict to one defense");
  rn->add_option("--g-variant", run.g_variant, "vulnerability-weight variant");
  double run_rho = 0, run_lambda = 0, run_epsilon = 0;
  auto* rho_opt = rn->add_option("--rho", run_rho, "VAT base magnitude");
  auto* lambda_opt = rn->add_option("--lambda", run_lambda, "adversarial weight");
  auto* epsilon_opt = rn->add_option("--epsilon", run_epsilon, "APR magnitude");
  rn->add_option("--out", run.out, "output directory");
  std::uint32_t run_jobs = 0;
  auto* jobs_opt = rn->add_option("--jobs", run_jobs, "parallel cells");

  ReportArgs report;
  auto* rpt = app.add_subcommand("report", "aggregate cell metrics");
  rpt->add_option("--runs", report.runs, "experiment output directory")->required();
  rpt->add_option("--out", report.out, "output directory (default: --runs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (prep->parsed()) return cmd_prepare(prepare);
    if (atk->parsed()) {
      if (atk_seed->count() > 0) attack.seed = attack_seed;
      return cmd_attack(attack);
    }
    if (trn->parsed()) {
      train.config.defense = defense_from_string(train_defense);
      train.config.g_variant = g_variant_from_string(train_variant);
      if (trn_seed->count() > 0) train.seed = train_seed;
      return cmd_train(train);
    }
    if (evl->parsed()) return cmd_eval(eval);
    if (anl->parsed()) return cmd_analyze(analyze);
    if (rn->parsed()) {
      if (rho_opt->count() > 0) run.rho = run_rho;
      if (lambda_opt->count() > 0) run.lambda = run_lambda;
      if (epsilon_opt->count() > 0) run.epsilon = run_epsilon;
      if (jobs_opt->count() > 0) run.jobs = run_jobs;
      return cmd_run(run);
    }
    if (rpt->parsed()) return cmd_report(report);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
