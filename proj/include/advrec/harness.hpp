#pragma once
// Experiment orchestration: the attack x defense x seed grid, per-run
// training with checkpoint evaluations, sweep curves and report emission.
//
// Cells are independent given the plan; they run in a small worker pool and
// own their rng streams and output subdirectory. A cell rerun in isolation
// reproduces its outputs byte-identically.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advrec/adv_trainer.hpp"
#include "advrec/attack.hpp"
#include "advrec/config.hpp"
#include "advrec/dataset.hpp"
#include "advrec/metrics.hpp"
#include "advrec/pipeline.hpp"
#include "advrec/report.hpp"

namespace advrec {

struct SyntheticSpec {
  std::uint32_t users = 2000;
  std::uint32_t items = 1500;
  std::uint32_t blocks = 4;
  double density = 0.02;
  double affinity = 9.0;
};

struct DatasetSource {
  std::string path;  // empty = synthetic
  SyntheticSpec synthetic;
};

struct TargetSpec {
  std::uint32_t count = 5;
  double popularity_cap = 0.05;
};

struct ExperimentPlan {
  DatasetSource dataset;
  SplitSpec split;
  TargetSpec targets;
  AttackConfig attack;
  RunConfig train;  // defense/epsilon/rho/lambda applied per cell
  std::vector<AttackKind> attacks = {AttackKind::kNone, AttackKind::kRandom};
  std::vector<Defense> defenses = {Defense::kNone, Defense::kApr, Defense::kVat};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<double> sweep_rho;     // optional VAT rho grid
  std::vector<double> sweep_lambda;  // optional VAT lambda grid
  std::string out_dir = "runs";
  std::uint32_t jobs = 1;

  void validate() const;
};

ExperimentPlan plan_from_toml(const std::string& text);
ExperimentPlan plan_from_toml_file(const std::string& path);

// Per-epoch diagnostics and checkpoint evaluations for one training run.
struct CheckpointMetrics {
  std::uint32_t epoch = 0;
  double hr = 0.0;
  double ndcg = 0.0;
  double t_hr = 0.0;
  double t_ndcg = 0.0;
};

struct TrainOutput {
  ModelState state;
  AttackStatusSeries statuses;
  UserLossLedger ledger;  // last epoch's snapshot
  std::vector<CheckpointMetrics> checkpoints;
  std::string diagnostics_jsonl;
};

// Warm-up plain epochs followed by defense epochs, evaluating every
// config.eval_every epochs. The rng must be the run's root stream; training,
// init and evaluation streams are forked from it by purpose.
TrainOutput run_training(const InteractionDataset& dataset,
                         const TargetSet& targets, const RunConfig& config,
                         RngStream root);

// Base split and targets for one seed; identical across the seed's cells.
struct SeedContext {
  InteractionDataset dataset;
  TargetSet targets;
};
SeedContext prepare_seed(const ExperimentPlan& plan, std::uint64_t seed);

struct CellSpec {
  AttackKind attack = AttackKind::kNone;
  Defense defense = Defense::kNone;
  std::uint64_t seed = 0;
  // sweep overrides; empty = use plan.train values
  std::optional<double> rho;
  std::optional<double> lambda;
  std::string rel_dir;  // output directory relative to the plan root
};

struct CellResult {
  MetricRow row;
  std::map<std::string, std::string> files;  // rel path -> bytes
  bool failed = false;
  std::string error;
};

std::vector<CellSpec> plan_cells(const ExperimentPlan& plan);
CellResult run_cell(const ExperimentPlan& plan, const CellSpec& cell);

struct ExperimentReport {
  MetricTable table;
  std::vector<std::string> failures;  // one entry per failed cell
};

// Runs every cell, writes per-cell artifacts, the aggregate report.csv /
// report.json, sweep curves when configured, and manifest.json under
// plan.out_dir. Failed cells are recorded and the rest continue.
ExperimentReport run_experiment(const ExperimentPlan& plan);

// Prepared-dataset directory: train/validation/test TSVs with external
// keys, targets and a split manifest.
void write_prepared_dataset(const std::string& dir,
                            const InteractionDataset& dataset,
                            const TargetSet& targets, std::uint64_t seed,
                            const SplitSpec& spec);
struct PreparedDataset {
  InteractionDataset dataset;
  TargetSet targets;
  std::uint64_t seed = 0;
};
PreparedDataset load_prepared_dataset(const std::string& dir);

// Fake-profile manifest: per profile, targets and filler external keys.
std::string fake_profiles_json(const std::vector<FakeProfile>& profiles,
                               const InteractionDataset& dataset,
                               const TargetSet& targets);
std::vector<FakeProfile> fake_profiles_from_json(const std::string& text,
                                                 const InteractionDataset& dataset);

}  // namespace advrec
