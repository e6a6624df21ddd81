#include "advrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "advrec/toml.hpp"

namespace advrec {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint32_t kDiagnosticBins = 10;

std::vector<std::uint32_t> histogram(const std::vector<double>& values, double lo,
                                     double hi, std::uint32_t n_bins) {
  std::vector<std::uint32_t> bins(n_bins, 0);
  const double width = (hi - lo) / n_bins;
  for (double v : values) {
    std::uint32_t b = 0;
    if (width > 0.0)
      b = std::min<std::uint32_t>(
          n_bins - 1, static_cast<std::uint32_t>((v - lo) / width));
    ++bins[b];
  }
  return bins;
}

}  // namespace

void ExperimentPlan::validate() const {
  split.validate();
  attack.validate();
  train.validate();
  if (attacks.empty()) throw ConfigError("plan needs at least one attack");
  if (defenses.empty()) throw ConfigError("plan needs at least one defense");
  if (seeds.empty()) throw ConfigError("plan needs at least one seed");
  if (std::set(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("duplicate seeds in plan");
  if (targets.count == 0) throw ConfigError("plan needs at least one target");
  if (!(targets.popularity_cap > 0.0 && targets.popularity_cap <= 1.0))
    throw ConfigError("target popularity cap must be in (0, 1]");
  if (dataset.path.empty()) {
    if (dataset.synthetic.users == 0 || dataset.synthetic.items == 0)
      throw ConfigError("synthetic dataset needs users and items");
  }
  if (out_dir.empty()) throw ConfigError("output directory must be set");
  if (jobs == 0) throw ConfigError("jobs must be positive");
}

ExperimentPlan plan_from_toml(const std::string& text) {
  const auto toml = TomlTable::parse(text);

  static const std::set<std::pair<std::string, std::string>> known = {
      {"dataset", "source"},        {"dataset", "path"},
      {"dataset", "users"},         {"dataset", "items"},
      {"dataset", "blocks"},        {"dataset", "density"},
      {"dataset", "affinity"},      {"split", "kcore"},
      {"split", "train_fraction"},  {"split", "validation_fraction"},
      {"targets", "count"},         {"targets", "popularity_cap"},
      {"attack", "budget"},         {"attack", "profile_size"},
      {"attack", "popular_pool_fraction"},
      {"attack", "popular_fraction"},
      {"train", "d"},               {"train", "learning_rate"},
      {"train", "weight_decay"},    {"train", "epochs"},
      {"train", "warmup_epochs"},   {"train", "batch_size"},
      {"train", "eval_every"},      {"train", "k_rec"},
      {"train", "k_target"},        {"defense", "epsilon"},
      {"defense", "rho"},           {"defense", "lambda"},
      {"defense", "g_variant"},     {"defense", "clamp_c"},
      {"experiment", "attacks"},    {"experiment", "defenses"},
      {"experiment", "seeds"},      {"experiment", "out"},
      {"experiment", "jobs"},       {"sweep", "rho"},
      {"sweep", "lambda"},
  };
  for (const auto& key : toml.keys()) {
    if (!known.count(key))
      throw ConfigError("unknown config key: [" + key.first + "] " + key.second);
  }

  ExperimentPlan plan;
  auto get_u32 = [&](const char* sec, const char* key, std::uint32_t& out) {
    if (const auto* v = toml.find(sec, key)) {
      const auto i = v->as_int();
      if (i < 0) throw ConfigError(std::string(key) + " must be >= 0");
      out = static_cast<std::uint32_t>(i);
    }
  };
  auto get_f64 = [&](const char* sec, const char* key, double& out) {
    if (const auto* v = toml.find(sec, key)) out = v->as_double();
  };

  if (const auto* v = toml.find("dataset", "source")) {
    const auto& source = v->as_string();
    if (source != "synthetic" && source != "file")
      throw ConfigError("dataset source must be synthetic or file");
    if (source == "file" && !toml.contains("dataset", "path"))
      throw ConfigError("dataset source=file requires a path");
  }
  if (const auto* v = toml.find("dataset", "path")) plan.dataset.path = v->as_string();
  get_u32("dataset", "users", plan.dataset.synthetic.users);
  get_u32("dataset", "items", plan.dataset.synthetic.items);
  get_u32("dataset", "blocks", plan.dataset.synthetic.blocks);
  get_f64("dataset", "density", plan.dataset.synthetic.density);
  get_f64("dataset", "affinity", plan.dataset.synthetic.affinity);

  get_u32("split", "kcore", plan.split.kcore);
  get_f64("split", "train_fraction", plan.split.train_fraction);
  get_f64("split", "validation_fraction", plan.split.validation_fraction_of_train);

  get_u32("targets", "count", plan.targets.count);
  get_f64("targets", "popularity_cap", plan.targets.popularity_cap);

  get_f64("attack", "budget", plan.attack.budget_fraction);
  get_u32("attack", "profile_size", plan.attack.profile_size);
  get_f64("attack", "popular_pool_fraction", plan.attack.popular_pool_fraction);
  get_f64("attack", "popular_fraction", plan.attack.selected_fraction_popular);

  get_u32("train", "d", plan.train.d);
  get_f64("train", "learning_rate", plan.train.learning_rate);
  get_f64("train", "weight_decay", plan.train.weight_decay);
  get_u32("train", "epochs", plan.train.epochs);
  get_u32("train", "warmup_epochs", plan.train.warmup_epochs);
  get_u32("train", "batch_size", plan.train.batch_size);
  get_u32("train", "eval_every", plan.train.eval_every);
  get_u32("train", "k_rec", plan.train.k_rec);
  get_u32("train", "k_target", plan.train.k_target);

  get_f64("defense", "epsilon", plan.train.epsilon);
  get_f64("defense", "rho", plan.train.rho);
  get_f64("defense", "lambda", plan.train.lambda);
  get_f64("defense", "clamp_c", plan.train.clamp_c);
  if (const auto* v = toml.find("defense", "g_variant"))
    plan.train.g_variant = g_variant_from_string(v->as_string());

  if (const auto* v = toml.find("experiment", "attacks")) {
    plan.attacks.clear();
    for (const auto& s : v->as_string_array())
      plan.attacks.push_back(attack_from_string(s));
  }
  if (const auto* v = toml.find("experiment", "defenses")) {
    plan.defenses.clear();
    for (const auto& s : v->as_string_array())
      plan.defenses.push_back(defense_from_string(s));
  }
  if (const auto* v = toml.find("experiment", "seeds")) {
    plan.seeds.clear();
    for (auto i : v->as_int_array()) {
      if (i < 0) throw ConfigError("seeds must be non-negative");
      plan.seeds.push_back(static_cast<std::uint64_t>(i));
    }
  }
  if (const auto* v = toml.find("experiment", "out")) plan.out_dir = v->as_string();
  {
    std::uint32_t jobs = plan.jobs;
    get_u32("experiment", "jobs", jobs);
    plan.jobs = jobs;
  }

  if (const auto* v = toml.find("sweep", "rho")) plan.sweep_rho = v->as_double_array();
  if (const auto* v = toml.find("sweep", "lambda"))
    plan.sweep_lambda = v->as_double_array();

  plan.validate();
  return plan;
}

ExperimentPlan plan_from_toml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open plan file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return plan_from_toml(buf.str());
}

TrainOutput run_training(const InteractionDataset& dataset,
                         const TargetSet& targets, const RunConfig& config,
                         RngStream root) {
  config.validate();
  if (config.defense == Defense::kVat && config.warmup_epochs == 0)
    throw ConfigError("VAT needs at least one warm-up epoch for the loss ledger");

  TrainOutput out;
  out.state = ModelState(dataset.n_users, dataset.n_items, config.d);
  out.state.init_gaussian(root.fork("init"));
  out.ledger.reset(dataset.n_users);

  RngStream train_stream = root.fork("train");
  std::ostringstream diagnostics;

  const std::uint32_t k_eval = std::max(config.k_rec, config.k_target);

  auto evaluate = [&](std::uint32_t epoch) {
    const auto lists = rank_all_users(out.state, dataset, k_eval);
    CheckpointMetrics cp;
    cp.epoch = epoch;
    cp.hr = hr_at_k(lists, dataset, config.k_rec).value;
    cp.ndcg = ndcg_at_k(lists, dataset, config.k_rec).value;
    cp.t_hr = target_hr_at_k(lists, dataset, targets, config.k_target);
    cp.t_ndcg = target_ndcg_at_k(lists, dataset, targets, config.k_target);
    out.checkpoints.push_back(cp);
    out.statuses.checkpoint_epochs.push_back(epoch);
    out.statuses.affected.push_back(
        attack_status_all(lists, dataset, targets, config.k_target));
  };

  for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    RngStream epoch_rng = train_stream.fork(epoch);
    const bool adversarial =
        config.defense != Defense::kNone && epoch > config.warmup_epochs;

    EpochStats stats;
    VulnerabilityProfile profile;
    if (adversarial) {
      if (config.defense == Defense::kVat)
        profile = build_vulnerability_profile(out.ledger, config.g_variant,
                                              config.clamp_c);
      stats = train_epoch_adversarial(out.state, dataset, config, epoch_rng,
                                      out.ledger, profile);
    } else {
      stats = train_epoch_plain(out.state, dataset, config, epoch_rng, out.ledger);
    }
    out.state.check_finite("epoch " + std::to_string(epoch));

    Json line;
    line["epoch"] = epoch;
    line["mean_plain_loss"] = stats.mean_plain_loss;
    line["mean_adversarial_loss"] = stats.mean_adversarial_loss;
    if (adversarial) {
      std::vector<double> magnitudes(dataset.n_users);
      double max_magnitude = 0.0;
      for (UserIndex u = 0; u < dataset.n_users; ++u) {
        magnitudes[u] = config.defense == Defense::kVat
                            ? config.rho * profile.g_value[u]
                            : config.epsilon;
        max_magnitude = std::max(max_magnitude, magnitudes[u]);
      }
      if (config.defense == Defense::kVat)
        line["g_histogram"] = histogram(profile.g_value, 0.0, 1.0, kDiagnosticBins);
      else
        line["g_histogram"] = Json::array();
      line["magnitude_histogram"] =
          histogram(magnitudes, 0.0, max_magnitude, kDiagnosticBins);
    } else {
      line["g_histogram"] = Json::array();
      line["magnitude_histogram"] = Json::array();
    }
    diagnostics << line.dump() << "\n";

    if (epoch % config.eval_every == 0 || epoch == config.epochs) evaluate(epoch);
  }
  if (config.epochs == 0) evaluate(0);

  out.diagnostics_jsonl = diagnostics.str();
  return out;
}

SeedContext prepare_seed(const ExperimentPlan& plan, std::uint64_t seed) {
  RngStream root(seed);
  std::vector<RawPair> raw;
  if (plan.dataset.path.empty()) {
    const auto& synth = plan.dataset.synthetic;
    raw = gen_synthetic(synth.users, synth.items, synth.blocks, synth.density,
                        root.fork("synthetic"), synth.affinity);
  } else {
    raw = load_interactions_file(plan.dataset.path);
  }
  SeedContext ctx;
  ctx.dataset = prepare_dataset(raw, plan.split, root.fork("pipeline"));
  ctx.targets = select_targets(ctx.dataset, plan.targets.count,
                               plan.targets.popularity_cap, root.fork("targets"));
  return ctx;
}

std::vector<CellSpec> plan_cells(const ExperimentPlan& plan) {
  std::vector<CellSpec> cells;
  auto dir_name = [](const CellSpec& cell) {
    std::string name = to_string(cell.attack) + "-" + to_string(cell.defense);
    if (cell.rho) name += "-rho" + format_double(*cell.rho);
    if (cell.lambda) name += "-lambda" + format_double(*cell.lambda);
    return name + "-s" + std::to_string(cell.seed);
  };
  for (const auto attack : plan.attacks) {
    for (const auto defense : plan.defenses) {
      for (const auto seed : plan.seeds) {
        CellSpec cell;
        cell.attack = attack;
        cell.defense = defense;
        cell.seed = seed;
        cell.rel_dir = "cells/" + dir_name(cell);
        cells.push_back(std::move(cell));
      }
    }
  }
  for (const auto attack : plan.attacks) {
    for (const double rho : plan.sweep_rho) {
      for (const auto seed : plan.seeds) {
        CellSpec cell;
        cell.attack = attack;
        cell.defense = Defense::kVat;
        cell.seed = seed;
        cell.rho = rho;
        cell.rel_dir = "sweep/" + dir_name(cell);
        cells.push_back(std::move(cell));
      }
    }
    for (const double lambda : plan.sweep_lambda) {
      for (const auto seed : plan.seeds) {
        CellSpec cell;
        cell.attack = attack;
        cell.defense = Defense::kVat;
        cell.seed = seed;
        cell.lambda = lambda;
        cell.rel_dir = "sweep/" + dir_name(cell);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

namespace {

std::string split_manifest_json(const InteractionDataset& dataset,
                                const TargetSet& targets, std::uint64_t seed,
                                const SplitSpec& spec) {
  Json root;
  root["seed"] = seed;
  root["kcore"] = spec.kcore;
  root["train_fraction"] = spec.train_fraction;
  root["validation_fraction"] = spec.validation_fraction_of_train;
  root["n_users"] = dataset.n_users;
  root["n_items"] = dataset.n_items;
  root["train_pairs"] = dataset.train.size();
  root["validation_pairs"] = dataset.validation.size();
  root["test_pairs"] = dataset.test.size();
  Json target_keys = Json::array();
  Json target_popularity = Json::array();
  for (ItemIndex item : targets.items) {
    target_keys.push_back(dataset.ids.item_keys[item]);
    target_popularity.push_back(dataset.popularity[item]);
  }
  root["popularity_cap"] = targets.popularity_percentile_cap;
  root["target_items"] = std::move(target_keys);
  root["target_popularity"] = std::move(target_popularity);
  return root.dump(2) + "\n";
}

std::string checkpoints_csv(const std::vector<CheckpointMetrics>& checkpoints,
                            const RunConfig& config) {
  std::ostringstream out;
  out << "epoch,hr@" << config.k_rec << ",ndcg@" << config.k_rec << ",t_hr@"
      << config.k_target << ",t_ndcg@" << config.k_target << "\n";
  for (const auto& cp : checkpoints) {
    out << cp.epoch << ',' << format_double(cp.hr) << ','
        << format_double(cp.ndcg) << ',' << format_double(cp.t_hr) << ','
        << format_double(cp.t_ndcg) << "\n";
  }
  return out.str();
}

std::string user_loss_csv(const UserLossLedger& ledger, std::uint32_t n_genuine) {
  std::ostringstream out;
  out << "user,mean_loss\n";
  for (UserIndex u = 0; u < n_genuine; ++u) {
    if (!ledger.has_snapshot(u)) continue;
    out << u << ',' << format_double(ledger.epoch_mean(u)) << "\n";
  }
  return out.str();
}

std::string cell_config_json(const ExperimentPlan& plan, const CellSpec& cell,
                             const RunConfig& config) {
  Json root;
  root["attack"] = to_string(cell.attack);
  root["defense"] = to_string(cell.defense);
  root["seed"] = cell.seed;
  root["d"] = config.d;
  root["learning_rate"] = config.learning_rate;
  root["weight_decay"] = config.weight_decay;
  root["epochs"] = config.epochs;
  root["warmup_epochs"] = config.warmup_epochs;
  root["batch_size"] = config.batch_size;
  root["eval_every"] = config.eval_every;
  root["k_rec"] = config.k_rec;
  root["k_target"] = config.k_target;
  root["epsilon"] = config.epsilon;
  root["rho"] = config.rho;
  root["lambda"] = config.lambda;
  root["g_variant"] = to_string(config.g_variant);
  root["clamp_c"] = config.clamp_c;
  root["attack_budget"] = plan.attack.budget_fraction;
  root["attack_profile_size"] = plan.attack.profile_size;
  return root.dump(2) + "\n";
}

}  // namespace

CellResult run_cell(const ExperimentPlan& plan, const CellSpec& cell) {
  CellResult result;
  try {
    auto ctx = prepare_seed(plan, cell.seed);
    RngStream root(cell.seed);

    InteractionDataset working = ctx.dataset;
    std::vector<FakeProfile> profiles;
    if (cell.attack != AttackKind::kNone) {
      RngStream attack_rng = root.fork("attack").fork(to_string(cell.attack));
      profiles = cell.attack == AttackKind::kRandom
                     ? gen_random_attack(ctx.dataset, ctx.targets, plan.attack,
                                         attack_rng)
                     : gen_bandwagon_attack(ctx.dataset, ctx.targets, plan.attack,
                                            attack_rng);
      working = inject_profiles(ctx.dataset, profiles);
    }

    RunConfig config = plan.train;
    config.seed = cell.seed;
    config.defense = cell.defense;
    if (cell.rho) config.rho = *cell.rho;
    if (cell.lambda) config.lambda = *cell.lambda;

    auto trained = run_training(working, ctx.targets, config, root.fork("model"));

    result.row.attack = to_string(cell.attack);
    result.row.defense = to_string(cell.defense);
    result.row.g_variant =
        cell.defense == Defense::kVat ? to_string(config.g_variant) : "-";
    result.row.seed = cell.seed;
    const auto& final_cp = trained.checkpoints.back();
    result.row.hr = final_cp.hr;
    result.row.ndcg = final_cp.ndcg;
    result.row.t_hr = final_cp.t_hr;
    result.row.t_ndcg = final_cp.t_ndcg;

    MetricTable cell_table;
    cell_table.k_rec = config.k_rec;
    cell_table.k_target = config.k_target;
    cell_table.rows.push_back(result.row);

    auto& files = result.files;
    files["metrics.csv"] = metric_table_csv(cell_table);
    files["checkpoints.csv"] = checkpoints_csv(trained.checkpoints, config);
    files["diagnostics.jsonl"] = trained.diagnostics_jsonl;
    files["statuses.csv"] = status_series_csv(trained.statuses);
    files["user_loss.csv"] =
        user_loss_csv(trained.ledger, working.genuine_user_count());
    files["cell_config.json"] = cell_config_json(plan, cell, config);
    if (!profiles.empty())
      files["fake_profiles.json"] =
          fake_profiles_json(profiles, working, ctx.targets);

    if (trained.statuses.affected.size() >= 2)
      files["fluctuation.csv"] =
          fluctuation_csv(fluctuation_report(trained.statuses));
    files["loss_bins.csv"] = loss_bins_csv(
        loss_bin_report(trained.ledger, trained.statuses.affected.back(), 20));

    files["checkpoint.bin"] =
        checkpoint_bytes(trained.state, cell.seed, config.epochs);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
    result.files.clear();
  }
  return result;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const auto cells = plan_cells(plan);

  std::vector<CellResult> results(cells.size());
  {
    std::atomic<std::size_t> next{0};
    const auto workers = std::min<std::size_t>(plan.jobs, cells.size());
    auto work = [&] {
      for (;;) {
        const auto idx = next.fetch_add(1);
        if (idx >= cells.size()) return;
        results[idx] = run_cell(plan, cells[idx]);
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
  }

  namespace fs = std::filesystem;
  Manifest manifest;
  auto emit = [&](const std::string& rel, const std::string& content) {
    write_file((fs::path(plan.out_dir) / rel).string(), content);
    manifest.add(rel, content);
  };

  ExperimentReport report;
  report.table.k_rec = plan.train.k_rec;
  report.table.k_target = plan.train.k_target;

  // per-seed split manifests, shared by all of the seed's cells
  for (const auto seed : plan.seeds) {
    try {
      const auto ctx = prepare_seed(plan, seed);
      emit("seeds/seed" + std::to_string(seed) + "/split_manifest.json",
           split_manifest_json(ctx.dataset, ctx.targets, seed, plan.split));
    } catch (const std::exception& e) {
      report.failures.push_back("seeds/seed" + std::to_string(seed) + ": " +
                                e.what());
    }
  }

  std::ostringstream sweep_rho_csv, sweep_lambda_csv;
  const std::string sweep_header =
      "param,param_value,attack,defense,seed,hr,ndcg,t_hr,t_ndcg\n";
  sweep_rho_csv << sweep_header;
  sweep_lambda_csv << sweep_header;

  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const auto& cell = cells[idx];
    const auto& result = results[idx];
    if (result.failed) {
      report.failures.push_back(cell.rel_dir + ": " + result.error);
      continue;
    }
    for (const auto& [rel, content] : result.files)
      emit(cell.rel_dir + "/" + rel, content);

    const bool is_sweep = cell.rho.has_value() || cell.lambda.has_value();
    if (!is_sweep) {
      report.table.rows.push_back(result.row);
    } else {
      auto& stream = cell.rho ? sweep_rho_csv : sweep_lambda_csv;
      const double value = cell.rho ? *cell.rho : *cell.lambda;
      stream << (cell.rho ? "rho" : "lambda") << ',' << format_double(value)
             << ',' << result.row.attack << ',' << result.row.defense << ','
             << result.row.seed << ',' << format_double(result.row.hr) << ','
             << format_double(result.row.ndcg) << ','
             << format_double(result.row.t_hr) << ','
             << format_double(result.row.t_ndcg) << "\n";
    }
  }

  emit("report.csv", metric_table_csv(report.table));
  emit("report.json", metric_table_json(report.table));
  if (!plan.sweep_rho.empty()) emit("sweep_rho.csv", sweep_rho_csv.str());
  if (!plan.sweep_lambda.empty()) emit("sweep_lambda.csv", sweep_lambda_csv.str());

  if (!report.failures.empty()) {
    std::ostringstream failures;
    for (const auto& f : report.failures) failures << f << "\n";
    emit("failures.txt", failures.str());
  }

  write_file((fs::path(plan.out_dir) / "manifest.json").string(),
             manifest.to_json());
  return report;
}

namespace {

std::string interactions_tsv(const InteractionDataset& dataset,
                             const std::vector<Interaction>& split) {
  std::ostringstream out;
  for (const auto& [u, i] : split)
    out << dataset.ids.user_keys[u] << '\t' << dataset.ids.item_keys[i] << "\n";
  return out.str();
}

std::vector<Interaction> tsv_to_pairs(const std::string& text,
                                      const IdMaps& ids) {
  std::vector<Interaction> pairs;
  if (text.empty()) return pairs;
  for (const auto& [user_key, item_key] : parse_interactions(text)) {
    pairs.push_back(
        {ids.user_to_index.at(user_key), ids.item_to_index.at(item_key)});
  }
  return pairs;
}

}  // namespace

void write_prepared_dataset(const std::string& dir,
                            const InteractionDataset& dataset,
                            const TargetSet& targets, std::uint64_t seed,
                            const SplitSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto key_lines = [](const std::vector<std::string>& keys) {
    std::ostringstream out;
    for (const auto& key : keys) out << key << "\n";
    return out.str();
  };
  // index tables first; line number = dense index
  write_file((fs::path(dir) / "users.tsv").string(),
             key_lines(dataset.ids.user_keys));
  write_file((fs::path(dir) / "items.tsv").string(),
             key_lines(dataset.ids.item_keys));
  write_file((fs::path(dir) / "train.tsv").string(),
             interactions_tsv(dataset, dataset.train));
  write_file((fs::path(dir) / "validation.tsv").string(),
             interactions_tsv(dataset, dataset.validation));
  write_file((fs::path(dir) / "test.tsv").string(),
             interactions_tsv(dataset, dataset.test));
  write_file((fs::path(dir) / "split_manifest.json").string(),
             split_manifest_json(dataset, targets, seed, spec));
}

PreparedDataset load_prepared_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  PreparedDataset out;
  auto& ds = out.dataset;

  auto read_keys = [](const std::string& path) {
    std::vector<std::string> keys;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) keys.push_back(line);
    }
    if (keys.empty()) throw IoError("empty id table: " + path);
    return keys;
  };
  ds.ids.user_keys = read_keys((fs::path(dir) / "users.tsv").string());
  ds.ids.item_keys = read_keys((fs::path(dir) / "items.tsv").string());
  for (std::size_t u = 0; u < ds.ids.user_keys.size(); ++u)
    ds.ids.user_to_index.emplace(ds.ids.user_keys[u], static_cast<UserIndex>(u));
  for (std::size_t i = 0; i < ds.ids.item_keys.size(); ++i)
    ds.ids.item_to_index.emplace(ds.ids.item_keys[i], static_cast<ItemIndex>(i));
  ds.n_users = static_cast<std::uint32_t>(ds.ids.user_keys.size());
  ds.n_items = static_cast<std::uint32_t>(ds.ids.item_keys.size());

  ds.train = tsv_to_pairs(read_file((fs::path(dir) / "train.tsv").string()), ds.ids);
  ds.validation =
      tsv_to_pairs(read_file((fs::path(dir) / "validation.tsv").string()), ds.ids);
  ds.test = tsv_to_pairs(read_file((fs::path(dir) / "test.tsv").string()), ds.ids);
  ds.rebuild_index();

  const auto manifest = Json::parse(
      read_file((fs::path(dir) / "split_manifest.json").string()));
  out.seed = manifest.at("seed").get<std::uint64_t>();
  out.targets.popularity_percentile_cap =
      manifest.at("popularity_cap").get<double>();
  for (const auto& key : manifest.at("target_items"))
    out.targets.items.push_back(ds.ids.item_to_index.at(key.get<std::string>()));
  std::sort(out.targets.items.begin(), out.targets.items.end());
  return out;
}

std::string fake_profiles_json(const std::vector<FakeProfile>& profiles,
                               const InteractionDataset& dataset,
                               const TargetSet& targets) {
  Json root;
  root["n_profiles"] = profiles.size();
  Json list = Json::array();
  for (const auto& profile : profiles) {
    Json entry;
    entry["user"] = profile.user;
    Json target_keys = Json::array();
    Json filler_keys = Json::array();
    for (ItemIndex item : profile.items) {
      const bool is_target = std::binary_search(targets.items.begin(),
                                                targets.items.end(), item);
      (is_target ? target_keys : filler_keys)
          .push_back(dataset.ids.item_keys[item]);
    }
    entry["targets"] = std::move(target_keys);
    entry["fillers"] = std::move(filler_keys);
    list.push_back(std::move(entry));
  }
  root["profiles"] = std::move(list);
  return root.dump(2) + "\n";
}

std::vector<FakeProfile> fake_profiles_from_json(const std::string& text,
                                                 const InteractionDataset& dataset) {
  const auto root = Json::parse(text);
  std::vector<FakeProfile> profiles;
  UserIndex next = dataset.n_users;
  for (const auto& entry : root.at("profiles")) {
    FakeProfile profile;
    profile.user = next++;
    for (const auto& key : entry.at("targets"))
      profile.items.push_back(dataset.ids.item_to_index.at(key.get<std::string>()));
    for (const auto& key : entry.at("fillers"))
      profile.items.push_back(dataset.ids.item_to_index.at(key.get<std::string>()));
    std::sort(profile.items.begin(), profile.items.end());
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

}  // namespace advrec
