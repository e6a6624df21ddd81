#include "advrec/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace advrec {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("bad numeric field: " + s);
  return v;
}

std::vector<MetricAggregate> MetricTable::aggregate() const {
  std::vector<MetricAggregate> out;
  auto cell_of = [&](const MetricRow& row) -> MetricAggregate& {
    for (auto& agg : out) {
      if (agg.attack == row.attack && agg.defense == row.defense &&
          agg.g_variant == row.g_variant)
        return agg;
    }
    out.push_back({row.attack, row.defense, row.g_variant});
    return out.back();
  };
  // first pass groups per-seed values
  struct Values {
    std::vector<double> hr, ndcg, t_hr, t_ndcg;
  };
  std::vector<Values> grouped;
  for (const auto& row : rows) {
    auto& agg = cell_of(row);
    const auto idx = static_cast<std::size_t>(&agg - out.data());
    if (grouped.size() <= idx) grouped.resize(idx + 1);
    grouped[idx].hr.push_back(row.hr);
    grouped[idx].ndcg.push_back(row.ndcg);
    grouped[idx].t_hr.push_back(row.t_hr);
    grouped[idx].t_ndcg.push_back(row.t_ndcg);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    out[i].n_seeds = static_cast<std::uint32_t>(grouped[i].hr.size());
    out[i].hr_mean = mean(grouped[i].hr);
    out[i].hr_std = sample_std(grouped[i].hr, out[i].hr_mean);
    out[i].ndcg_mean = mean(grouped[i].ndcg);
    out[i].ndcg_std = sample_std(grouped[i].ndcg, out[i].ndcg_mean);
    out[i].t_hr_mean = mean(grouped[i].t_hr);
    out[i].t_hr_std = sample_std(grouped[i].t_hr, out[i].t_hr_mean);
    out[i].t_ndcg_mean = mean(grouped[i].t_ndcg);
    out[i].t_ndcg_std = sample_std(grouped[i].t_ndcg, out[i].t_ndcg_mean);
  }
  return out;
}

std::string metric_table_csv(const MetricTable& table) {
  std::ostringstream out;
  out << "attack,defense,g_variant,seed,hr@" << table.k_rec << ",ndcg@"
      << table.k_rec << ",t_hr@" << table.k_target << ",t_ndcg@"
      << table.k_target << "\n";
  for (const auto& row : table.rows) {
    out << row.attack << ',' << row.defense << ',' << row.g_variant << ','
        << row.seed << ',' << format_double(row.hr) << ','
        << format_double(row.ndcg) << ',' << format_double(row.t_hr) << ','
        << format_double(row.t_ndcg) << "\n";
  }
  return out.str();
}

MetricTable metric_table_from_csv(const std::string& csv) {
  MetricTable table;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty metric csv");
  auto header = split_csv_line(line);
  if (header.size() != 8) throw IoError("unexpected metric csv header");
  auto parse_k = [](const std::string& field) {
    const auto at = field.find('@');
    if (at == std::string::npos) throw IoError("missing @k in header");
    return static_cast<std::uint32_t>(std::stoul(field.substr(at + 1)));
  };
  table.k_rec = parse_k(header[4]);
  table.k_target = parse_k(header[6]);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 8) throw IoError("bad metric csv row: " + line);
    MetricRow row;
    row.attack = fields[0];
    row.defense = fields[1];
    row.g_variant = fields[2];
    row.seed = std::stoull(fields[3]);
    row.hr = parse_double(fields[4]);
    row.ndcg = parse_double(fields[5]);
    row.t_hr = parse_double(fields[6]);
    row.t_ndcg = parse_double(fields[7]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string metric_table_json(const MetricTable& table) {
  Json root;
  root["k_rec"] = table.k_rec;
  root["k_target"] = table.k_target;
  root["cells"] = Json::array();
  for (const auto& agg : table.aggregate()) {
    Json cell;
    cell["attack"] = agg.attack;
    cell["defense"] = agg.defense;
    cell["g_variant"] = agg.g_variant;
    cell["n_seeds"] = agg.n_seeds;
    cell["hr_mean"] = agg.hr_mean;
    cell["hr_std"] = agg.hr_std;
    cell["ndcg_mean"] = agg.ndcg_mean;
    cell["ndcg_std"] = agg.ndcg_std;
    cell["t_hr_mean"] = agg.t_hr_mean;
    cell["t_hr_std"] = agg.t_hr_std;
    cell["t_ndcg_mean"] = agg.t_ndcg_mean;
    cell["t_ndcg_std"] = agg.t_ndcg_std;
    root["cells"].push_back(std::move(cell));
  }
  return root.dump(2) + "\n";
}

std::string loss_bins_csv(const std::vector<LossBin>& bins) {
  std::ostringstream out;
  out << "bin_lower,bin_upper,n_users,n_affected,affected_fraction,below_visibility\n";
  for (const auto& bin : bins) {
    out << format_double(bin.lower) << ',' << format_double(bin.upper) << ','
        << bin.n_users << ',' << bin.n_affected << ','
        << format_double(bin.affected_fraction) << ','
        << (bin.below_visibility_threshold ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string fluctuation_csv(const FluctuationReport& report) {
  std::ostringstream out;
  out << "histogram,count_value,n_users\n";
  for (std::size_t c = 0; c < report.affected_count_histogram.size(); ++c)
    out << "affected_checkpoints," << c << ','
        << report.affected_count_histogram[c] << "\n";
  for (std::size_t c = 0; c < report.change_count_histogram.size(); ++c)
    out << "status_changes," << c << ',' << report.change_count_histogram[c]
        << "\n";
  return out.str();
}

std::string status_series_csv(const AttackStatusSeries& series) {
  std::ostringstream out;
  out << "epoch,user,affected\n";
  for (std::size_t c = 0; c < series.affected.size(); ++c) {
    for (std::size_t u = 0; u < series.affected[c].size(); ++u) {
      out << series.checkpoint_epochs[c] << ',' << u << ','
          << (series.affected[c][u] ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

AttackStatusSeries status_series_from_csv(const std::string& csv,
                                          std::uint32_t n_users) {
  AttackStatusSeries series;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty status csv");
  std::int64_t current_epoch = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) throw IoError("bad status row: " + line);
    const auto epoch = std::stoll(fields[0]);
    const auto user = std::stoul(fields[1]);
    if (epoch != current_epoch) {
      series.checkpoint_epochs.push_back(static_cast<std::uint32_t>(epoch));
      series.affected.emplace_back(n_users, false);
      current_epoch = epoch;
    }
    if (user >= n_users) throw IoError("status user out of range");
    series.affected.back()[user] = fields[2] == "1";
  }
  return series;
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void Manifest::add(const std::string& relative_path, const std::string& content) {
  entries_.emplace_back(relative_path, sha256_hex(content));
}

std::string Manifest::to_json() const {
  Json root;
  root["files"] = Json::array();
  for (const auto& [path, hash] : entries_) {
    Json entry;
    entry["path"] = path;
    entry["sha256"] = hash;
    root["files"].push_back(std::move(entry));
  }
  return root.dump(2) + "\n";
}

}  // namespace advrec
