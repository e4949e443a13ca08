#include "dataquote/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "dataquote/error.hpp"
#include "dataquote/format.hpp"
#include "dataquote/rng.hpp"

namespace dq {

namespace {

using Json = nlohmann::ordered_json;

std::vector<double> metric_values(const RunRow& r) {
  std::vector<double> v{r.welfare.server,    r.welfare.users, r.welfare.total, r.welfare.transfer_free,
                        r.fairness.jain,     r.fairness.cv,   r.fairness.min_max_ratio,
                        r.regret_total,      r.regret_max,    r.regret_min,
                        r.fulfillment,       r.rounds};
  v.insert(v.end(), r.supply_bins.begin(), r.supply_bins.end());
  return v;
}

std::vector<std::string> metric_names(std::size_t n_bins) {
  std::vector<std::string> names{"server_payoff", "users_payoff",    "welfare",    "welfare_transfer_free",
                                 "jain",          "cv",              "min_max_ratio", "regret_ub_total",
                                 "regret_ub_max", "regret_ub_min",   "fulfillment", "rounds"};
  for (std::size_t b = 1; b <= n_bins; ++b) names.push_back("supply_bin_" + std::to_string(b));
  return names;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + p.string() + "'");
  out << content;
}

}  // namespace

std::vector<std::string> raw_columns(std::size_t n_bins) {
  std::vector<std::string> cols{"experiment", "cell", "mechanism", "replicate"};
  for (const auto& n : metric_names(n_bins)) cols.push_back(n);
  cols.push_back("status");
  return cols;
}

void write_raw_csv(std::ostream& out, const ExperimentReport& report, std::size_t n_bins) {
  const auto cols = raw_columns(n_bins);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.experiment << ',' << r.cell << ',' << r.mechanism << ',' << r.replicate;
    auto values = metric_values(r);
    values.resize(metric_names(n_bins).size(), NAN);
    for (double v : values) out << ',' << format_number(v);
    out << ',' << r.status << '\n';
  }
}

std::string summary_json(const ExperimentReport& report, std::size_t n_bins) {
  const auto names = metric_names(n_bins);
  // Cells in order of first appearance.
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const RunRow*>> groups;
  for (const auto& r : report.rows) {
    auto key = std::make_pair(r.cell, r.mechanism);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }
  Json cells = Json::array();
  for (const auto& key : keys) {
    const auto& rows = groups[key];
    Json metrics = Json::object();
    std::size_t failed = 0;
    for (const auto* r : rows)
      if (r->status != "ok") ++failed;
    for (std::size_t m = 0; m < names.size(); ++m) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto* r : rows) {
        auto v = metric_values(*r);
        v.resize(names.size(), NAN);
        if (std::isfinite(v[m])) {
          sum += v[m];
          ++n;
        }
      }
      const double mean = n ? sum / static_cast<double>(n) : NAN;
      double ss = 0.0;
      for (const auto* r : rows) {
        auto v = metric_values(*r);
        v.resize(names.size(), NAN);
        if (std::isfinite(v[m])) ss += (v[m] - mean) * (v[m] - mean);
      }
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : NAN;
      const double half = n > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(n)) : NAN;
      metrics[names[m]] = Json{{"mean", number_or_null(mean)},
                               {"sd", number_or_null(sd)},
                               {"ci95_half_width", number_or_null(half)},
                               {"n", n}};
    }
    cells.push_back(Json{{"cell", key.first}, {"mechanism", key.second}, {"runs", rows.size()}, {"failed", failed},
                         {"metrics", metrics}});
  }
  Json doc{{"experiment", report.experiment}, {"cells", cells}};
  return doc.dump(2) + "\n";
}

std::string provenance_json(const ExperimentReport& report, const ExperimentConfig& cfg) {
  // Worker count and output directory do not affect results; keep them out
  // of the hash so reruns elsewhere compare equal.
  ExperimentConfig canonical = cfg;
  canonical.workers = 1;
  canonical.output = "";
  const std::string text = emit_config(canonical);
  std::ostringstream hash;
  hash << std::hex << fnv1a(text);
  Json doc{{"version", DQ_VERSION},
           {"experiment", report.experiment},
           {"master_seed", cfg.seed},
           {"config_hash", "fnv1a64:" + hash.str()},
           {"rows", report.rows.size()},
           {"notes", report.notes}};
  return doc.dump(2) + "\n";
}

void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  std::ostringstream raw;
  write_raw_csv(raw, report, cfg.freerider_bins);
  write_file(base / "raw.csv", raw.str());
  write_file(base / "summary.json", summary_json(report, cfg.freerider_bins));
  write_file(base / "effective.cfg", emit_config(cfg));
  write_file(base / "provenance.json", provenance_json(report, cfg));
}

}  // namespace dq
