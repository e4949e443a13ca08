#pragma once

// Monte Carlo driver for the experiment families. Every replicate draws
// its population from a stream that depends only on (seed, replicate,
// purpose), so results do not depend on worker count or on which
// mechanisms are enabled.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dataquote/config.hpp"
#include "dataquote/metrics.hpp"

namespace dq {

struct RunRow {
  std::string experiment;
  std::string cell;
  std::string mechanism;
  long replicate = 0;
  WelfareBreakdown welfare;
  FairnessIndices fairness;
  double regret_total = NAN;
  double regret_max = NAN;
  double regret_min = NAN;
  double fulfillment = NAN;
  double rounds = NAN;
  std::vector<double> supply_bins;
  std::string status = "ok";
};

struct ExperimentReport {
  std::string experiment;
  std::vector<RunRow> rows;  // sorted by cell, replicate, mechanism order
  std::vector<std::string> notes;
};

std::vector<UserProfile> sample_population(const ExperimentConfig& cfg, std::uint64_t replicate, double rho);
ServerCostModel model_for(const ExperimentConfig& cfg, const std::vector<UserProfile>& users);

// One mechanism on one population. Errors are caught and recorded in status.
RunRow run_mechanism(const std::string& mechanism, const std::vector<UserProfile>& users, const ExperimentConfig& cfg,
                     std::uint64_t replicate, double sigma = 0.0);

ExperimentReport run_comparison(const ExperimentConfig& cfg);
ExperimentReport run_robustness(const ExperimentConfig& cfg);
ExperimentReport run_convergence(const ExperimentConfig& cfg);
ExperimentReport run_oversupply(const ExperimentConfig& cfg);
ExperimentReport run_sweep(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name);

}  // namespace dq
