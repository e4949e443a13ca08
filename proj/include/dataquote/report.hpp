#pragma once

#include <iosfwd>
#include <string>

#include "dataquote/config.hpp"
#include "dataquote/experiments.hpp"

namespace dq {

std::vector<std::string> raw_columns(std::size_t n_bins);
void write_raw_csv(std::ostream& out, const ExperimentReport& report, std::size_t n_bins);
std::string summary_json(const ExperimentReport& report, std::size_t n_bins);
std::string provenance_json(const ExperimentReport& report, const ExperimentConfig& cfg);

// Writes raw.csv, summary.json, effective.cfg and provenance.json.
void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::string& dir);

}  // namespace dq
