// Command-line driver. Talks to the library only through the C API.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dataquote/dataquote.h"

namespace {

struct ExperimentDeleter {
  void operator()(dq_experiment* e) const { dq_experiment_destroy(e); }
};
using ExperimentPtr = std::unique_ptr<dq_experiment, ExperimentDeleter>;

int report_failure(dq_status s, const char* what) {
  std::fprintf(stderr, "dataquote: %s: %s (%s)\n", what, dq_last_error(), dq_status_name(s));
  return s == DQ_ERR_CONFIG ? 2 : 1;
}

struct Overrides {
  std::string config;
  std::optional<std::string> seed, runs, out, strategy, rho, sigma, workers;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "configuration file (key = value lines)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--runs", o.runs, "replicates per cell");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("--strategy", o.strategy, "oversupply allocation: major|minor|prop|random");
  cmd->add_option("--rho", o.rho, "informed fractions, comma separated");
  cmd->add_option("--sigma", o.sigma, "noise levels for the robustness sweep, comma separated");
  cmd->add_option("--workers", o.workers, "worker threads");
}

// Loads the config, applies flag overrides and warns about keys left at defaults.
dq_status load(const Overrides& o, ExperimentPtr& out) {
  dq_experiment* raw = nullptr;
  dq_status s = dq_experiment_load(o.config.empty() ? nullptr : o.config.c_str(), &raw);
  if (s != DQ_OK) return s;
  out.reset(raw);
  auto apply = [&](const char* key, const std::optional<std::string>& v) {
    if (s == DQ_OK && v) s = dq_experiment_set(raw, key, v->c_str());
  };
  apply("seed", o.seed);
  apply("runs", o.runs);
  apply("sweep.runs", o.runs);
  apply("output", o.out);
  apply("strategy", o.strategy);
  apply("rho", o.rho);
  apply("sigma", o.sigma);
  apply("workers", o.workers);
  if (s != DQ_OK) return s;

  size_t n = 0;
  dq_experiment_defaulted_count(raw, &n);
  if (!o.config.empty() && n > 0) {
    std::string keys;
    for (size_t i = 0; i < n; ++i) {
      const char* k = nullptr;
      dq_experiment_defaulted_key(raw, i, &k);
      keys += (i ? ", " : "") + std::string(k);
    }
    std::fprintf(stderr, "dataquote: warning: %zu keys not set in %s, using defaults: %s\n", n, o.config.c_str(),
                 keys.c_str());
  }
  return DQ_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data quotation market simulator"};
  app.set_version_flag("--version", std::string(dq_version()));
  app.require_subcommand(1);

  Overrides o;
  long replicate = 0;
  const char* experiments[][2] = {
      {"compare", "welfare, fairness and regret of every mechanism across informed fractions"},
      {"robustness", "OPP under parameter-estimation noise against IIQ"},
      {"convergence", "IIQ rounds and fulfillment over price steps and market sizes"},
      {"oversupply", "IIQ under each oversupply allocation strategy"},
      {"sweep", "one-parameter sweep (see sweep.axis)"},
  };
  for (auto& e : experiments) add_common(app.add_subcommand(e[0], e[1]), o);
  auto* ledger = app.add_subcommand("ledger", "write trade ledgers and outcomes for one replicate");
  add_common(ledger, o);
  ledger->add_option("--replicate", replicate, "replicate index")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  ExperimentPtr exp;
  if (dq_status s = load(o, exp); s != DQ_OK) return report_failure(s, "configuration");

  const std::string name = app.get_subcommands().front()->get_name();
  dq_status s = name == "ledger" ? dq_experiment_ledger(exp.get(), replicate, nullptr)
                                 : dq_experiment_run(exp.get(), name.c_str(), nullptr);
  if (s != DQ_OK) return report_failure(s, name.c_str());
  return 0;
}
