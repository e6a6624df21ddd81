#pragma once
// Metric tables, CSV/JSON emission and the output manifest.
//
// Numeric fields are printed via std::to_chars (shortest round-trip), so
// parsing an emitted CSV reproduces the in-memory values exactly and
// identical runs emit byte-identical files.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "advrec/metrics.hpp"
#include "advrec/types.hpp"

namespace advrec {

struct MetricRow {
  std::string attack;
  std::string defense;
  std::string g_variant;
  std::uint64_t seed = 0;
  double hr = 0.0;
  double ndcg = 0.0;
  double t_hr = 0.0;
  double t_ndcg = 0.0;
};

struct MetricAggregate {
  std::string attack;
  std::string defense;
  std::string g_variant;
  std::uint32_t n_seeds = 0;
  double hr_mean = 0.0, hr_std = 0.0;
  double ndcg_mean = 0.0, ndcg_std = 0.0;
  double t_hr_mean = 0.0, t_hr_std = 0.0;
  double t_ndcg_mean = 0.0, t_ndcg_std = 0.0;
};

struct MetricTable {
  std::uint32_t k_rec = 20;
  std::uint32_t k_target = 50;
  std::vector<MetricRow> rows;

  // Mean and sample standard deviation per (attack, defense, g_variant),
  // in first-appearance order.
  std::vector<MetricAggregate> aggregate() const;
};

std::string format_double(double v);
double parse_double(const std::string& s);

std::string metric_table_csv(const MetricTable& table);
MetricTable metric_table_from_csv(const std::string& csv);
std::string metric_table_json(const MetricTable& table);

std::string loss_bins_csv(const std::vector<LossBin>& bins);
std::string fluctuation_csv(const FluctuationReport& report);
std::string status_series_csv(const AttackStatusSeries& series);
AttackStatusSeries status_series_from_csv(const std::string& csv,
                                          std::uint32_t n_users);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string sha256_hex(const std::string& bytes);

// Relative path -> content hash for every emitted file.
class Manifest {
 public:
  void add(const std::string& relative_path, const std::string& content);
  std::string to_json() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace advrec
