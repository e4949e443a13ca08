#pragma once

// Experiment configuration: a `key = value` text file, '#' starts a
// comment, lists are comma separated. Unknown keys are rejected; missing
// keys take the defaults below and are reported as warnings.

#include <cstdint>
#include <string>
#include <vector>

#include "dataquote/econ.hpp"
#include "dataquote/quotation.hpp"
#include "dataquote/rng.hpp"

namespace dq {

// Population parameter distribution: constant(v), uniform(lo,hi),
// bimodal(lo1,hi1,lo2,hi2[,w]) with weight w on the first component,
// pareto(shape,scale).
struct DistSpec {
  enum class Family { constant, uniform, bimodal, pareto } family = Family::constant;
  std::vector<double> params{0.0};

  static DistSpec parse(const std::string& text);
  std::string str() const;
  double draw(Engine& eng) const;
  double mean() const;
};

struct ExperimentConfig {
  std::size_t users = 10;
  DistSpec endowment = DistSpec::parse("constant(6000)");
  DistSpec lambda = DistSpec::parse("uniform(0.5,30)");
  DistSpec theta = DistSpec::parse("uniform(0,5)");
  double k = 1.0;

  std::vector<std::string> mechanisms{"IIQ", "CIQ", "OPP", "BSP", "DNR", "GDPR", "FULL"};
  std::vector<double> rho{1.0};
  std::vector<double> sigma{0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};

  std::string sweep_axis = "none";  // none|dB|I|lambda_dist|theta_dist|k|alpha
  std::vector<std::string> sweep_values;  // ';' separated in the file
  long sweep_runs = 500;

  std::vector<double> convergence_dB{0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001};
  std::vector<double> convergence_users{5, 10, 20, 50, 100};

  long runs = 5000;
  std::uint64_t seed = 42;
  OversupplyStrategy strategy = OversupplyStrategy::minor_first;
  PriceSchedule schedule{0.001, 0.001};
  double unit = 1.0;
  ServerCostModel model;  // d_total is replaced by each sampled population's sum
  double grid_step = 10.0;
  std::size_t freerider_bins = 3;
  unsigned workers = 1;
  std::string output = "results";

  void validate() const;
  std::vector<std::string> effective_sweep_values() const;
};

struct ParsedConfig {
  ExperimentConfig config;
  std::vector<std::string> defaulted;  // keys that took their default
};

ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ParsedConfig parse_config_file(const std::string& path);
// Applies one `key = value` assignment on top of an existing config.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string emit_config(const ExperimentConfig& cfg);
const std::vector<std::string>& config_keys();

}  // namespace dq
