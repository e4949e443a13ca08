#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dataquote/error.hpp"
#include "dataquote/experiments.hpp"
#include "dataquote/report.hpp"
#include "doctest.h"

using namespace dq;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.runs = 6;
  cfg.sweep_runs = 3;
  return cfg;
}

std::string raw_text(const ExperimentReport& report, const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_raw_csv(out, report, cfg.freerider_bins);
  return out.str();
}

std::string error_text(const std::string& config) {
  try {
    parse_config_text(config, "case.cfg");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config takes every default and reports it") {
  const auto parsed = parse_config_text("# nothing here\n\n");
  CHECK(parsed.defaulted == config_keys());
  const ExperimentConfig& c = parsed.config;
  CHECK(c.users == 10);
  CHECK(c.runs == 5000);
  CHECK(c.seed == 42);
  CHECK(c.k == 1.0);
  CHECK(c.schedule.B0 == 0.001);
  CHECK(c.schedule.dB == 0.001);
  CHECK(c.unit == 1.0);
  CHECK(c.lambda.str() == "uniform(0.5,30)");
  CHECK(c.theta.str() == "uniform(0,5)");
  CHECK(c.endowment.str() == "constant(6000)");

  const auto partial = parse_config_text("runs = 7\nseed = 3 # trailing comment\n");
  CHECK(partial.config.runs == 7);
  CHECK(partial.config.seed == 3);
  CHECK(partial.defaulted.size() == config_keys().size() - 2);
}

TEST_CASE("config errors name the key and line") {
  const auto bad_number = error_text("seed = 1\nruns = 12x\n");
  CHECK(bad_number.find("case.cfg:2") != std::string::npos);
  CHECK(bad_number.find("runs") != std::string::npos);
  CHECK(error_text("no_such_key = 1\n").find("no_such_key") != std::string::npos);
  CHECK(error_text("runs = 1\nruns = 2\n").find("duplicate") != std::string::npos);
  CHECK(error_text("runs\n").find("case.cfg:1") != std::string::npos);
  CHECK(error_text("lambda = lognormal(1,2)\n").find("lambda") != std::string::npos);
  CHECK(error_text("runs = 0\n") != "");
  CHECK(error_text("rho = \n") != "");
  CHECK(error_text("strategy = sideways\n").find("strategy") != std::string::npos);
}

TEST_CASE("distribution specs") {
  for (const char* text : {"constant(5)", "uniform(0.5,30)", "bimodal(0.5,5,25,30,0.5)", "pareto(1.5,0.5)"})
    CHECK(DistSpec::parse(DistSpec::parse(text).str()).str() == DistSpec::parse(text).str());
  CHECK_THROWS_AS(DistSpec::parse("uniform(3,1)"), Error);
  CHECK_THROWS_AS(DistSpec::parse("pareto(0,1)"), Error);
  CHECK_THROWS_AS(DistSpec::parse("uniform(1"), Error);
  CHECK(DistSpec::parse("bimodal(0.5,5,25,30,0.5)").mean() == doctest::Approx(15.125));

  auto rng = make_stream(31, 0, "dist");
  const auto u = DistSpec::parse("uniform(0.5,30)");
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += u.draw(rng);
  CHECK(std::abs(sum / n / 15.25 - 1.0) < 0.01);
}

TEST_CASE("population sampling") {
  ExperimentConfig cfg;
  cfg.lambda = DistSpec::parse("constant(5)");
  const auto users = sample_population(cfg, 3, 1.0);
  CHECK(users.size() == 10);
  for (const auto& u : users) {
    CHECK(u.lambda == 5.0);
    CHECK(u.d == 6000.0);
    CHECK(u.informed);
  }

  const ExperimentConfig base;
  const auto a = sample_population(base, 11, 0.5), b = sample_population(base, 11, 0.5);
  std::size_t informed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lambda == b[i].lambda);
    CHECK(a[i].theta == b[i].theta);
    CHECK(a[i].informed == b[i].informed);
    informed += a[i].informed;
  }
  CHECK(informed == 5);
  // The informed share does not move the parameter draws.
  const auto c = sample_population(base, 11, 0.2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].lambda == c[i].lambda);
  CHECK(sample_population(base, 12, 0.5)[0].lambda != a[0].lambda);

  CHECK(model_for(base, a).d_total == 60000.0);
}

TEST_CASE("adding mechanisms leaves shared rows unchanged") {
  auto cfg = small_config();
  cfg.mechanisms = {"IIQ"};
  const auto alone = run_comparison(cfg);
  cfg.mechanisms = {"DNR", "IIQ", "OPP"};
  const auto together = run_comparison(cfg);
  std::vector<const RunRow*> picked;
  for (const auto& r : together.rows)
    if (r.mechanism == "IIQ") picked.push_back(&r);
  REQUIRE(picked.size() == alone.rows.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    CHECK(picked[i]->welfare.total == alone.rows[i].welfare.total);
    CHECK(picked[i]->replicate == alone.rows[i].replicate);
  }
}

TEST_CASE("do-not-redeem rows carry the full retention saving") {
  auto cfg = small_config();
  cfg.mechanisms = {"DNR"};
  cfg.rho = {0.0, 1.0};
  for (const auto& r : run_comparison(cfg).rows) {
    CHECK(r.welfare.total == doctest::Approx(956.0).epsilon(0.05));
    CHECK(r.status == "ok");
  }
}

TEST_CASE("robustness: zero noise equals exact personalized pricing") {
  auto cfg = small_config();
  cfg.sigma = {0.0, 1.0};
  const auto rep = run_robustness(cfg);
  std::map<std::string, std::vector<double>> by_cell;
  for (const auto& r : rep.rows) by_cell[r.cell + "/" + r.mechanism].push_back(r.welfare.total);
  auto cmp = cfg;
  cmp.mechanisms = {"OPP"};
  const auto exact = run_comparison(cmp);
  std::vector<double> opp;
  for (const auto& r : exact.rows) opp.push_back(r.welfare.total);
  CHECK(by_cell["sigma=0/OPP"] == opp);
  CHECK(by_cell["sigma=0/IIQ"] == by_cell["sigma=1/IIQ"]);
}

TEST_CASE("oversupply: single-user populations are strategy independent") {
  auto cfg = small_config();
  cfg.users = 1;
  const auto rep = run_oversupply(cfg);
  std::map<long, std::vector<double>> per_replicate;
  for (const auto& r : rep.rows) per_replicate[r.replicate].push_back(r.welfare.total);
  for (const auto& [rep_id, values] : per_replicate) {
    CHECK(values.size() == 4);
    for (double v : values) CHECK(v == values.front());
  }
}

TEST_CASE("config round trip reproduces raw rows") {
  auto cfg = small_config();
  cfg.mechanisms = {"IIQ", "OPP", "GDPR"};
  cfg.rho = {0.5, 1.0};
  cfg.seed = 9;
  const auto reparsed = parse_config_text(emit_config(cfg));
  CHECK(reparsed.defaulted.empty());
  CHECK(emit_config(reparsed.config) == emit_config(cfg));
  CHECK(raw_text(run_comparison(reparsed.config), reparsed.config) == raw_text(run_comparison(cfg), cfg));
}

TEST_CASE("raw rows do not depend on worker count") {
  for (const char* name : {"compare", "robustness", "oversupply", "convergence", "sweep"}) {
    auto cfg = small_config();
    cfg.runs = 4;
    cfg.sweep_runs = 2;
    cfg.sigma = {0.0, 0.5};
    cfg.convergence_dB = {0.05, 0.01};
    cfg.convergence_users = {5, 10};
    cfg.sweep_axis = "k";
    cfg.workers = 1;
    const auto serial = raw_text(run_experiment(cfg, name), cfg);
    cfg.workers = 3;
    CHECK(raw_text(run_experiment(cfg, name), cfg) == serial);
    CHECK(raw_text(run_experiment(cfg, name), cfg) == serial);
  }
}

TEST_CASE("summary means equal raw means") {
  auto cfg = small_config();
  cfg.rho = {0.5, 1.0};
  const auto rep = run_comparison(cfg);
  const auto doc = nlohmann::json::parse(summary_json(rep, cfg.freerider_bins));
  std::map<std::pair<std::string, std::string>, std::vector<double>> welfare, jain;
  for (const auto& r : rep.rows) {
    welfare[{r.cell, r.mechanism}].push_back(r.welfare.total);
    if (std::isfinite(r.fairness.jain)) jain[{r.cell, r.mechanism}].push_back(r.fairness.jain);
  }
  CHECK(doc["cells"].size() == welfare.size());
  for (const auto& cell : doc["cells"]) {
    const auto key = std::make_pair(cell["cell"].get<std::string>(), cell["mechanism"].get<std::string>());
    const auto& w = welfare[key];
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    CHECK(cell["metrics"]["welfare"]["mean"].get<double>() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(cell["metrics"]["welfare"]["n"].get<std::size_t>() == w.size());
    if (!jain[key].empty()) {
      double jm = 0.0;
      for (double v : jain[key]) jm += v;
      jm /= static_cast<double>(jain[key].size());
      CHECK(cell["metrics"]["jain"]["mean"].get<double>() == doctest::Approx(jm).epsilon(1e-12));
    }
  }
}

TEST_CASE("raw CSV layout") {
  auto cfg = small_config();
  cfg.runs = 1;
  cfg.mechanisms = {"GDPR"};
  const auto text = raw_text(run_comparison(cfg), cfg);
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header.rfind("experiment,cell,mechanism,replicate,server_payoff", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("compare,rho=1,GDPR,0,", 0) == 0);
}
