#include "dataquote/experiments.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>

#include "dataquote/benchmarks.hpp"
#include "dataquote/equilibrium.hpp"
#include "dataquote/error.hpp"
#include "dataquote/format.hpp"
#include "dataquote/quotation.hpp"

namespace dq {

namespace {

using Task = std::function<std::vector<RunRow>()>;

std::vector<RunRow> run_tasks(const std::vector<Task>& tasks, unsigned workers) {
  std::vector<std::vector<RunRow>> out(tasks.size());
  auto work = [&](unsigned w, unsigned stride) {
    for (std::size_t t = w; t < tasks.size(); t += stride) out[t] = tasks[t]();
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size()))));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }
  std::vector<RunRow> rows;
  for (auto& chunk : out)
    for (auto& r : chunk) rows.push_back(std::move(r));
  return rows;
}

std::string cell_name(const std::string& key, double v) { return key + "=" + format_number(v); }

RunRow failed_row(const std::string& mechanism, std::uint64_t replicate, const std::string& why) {
  RunRow r;
  r.mechanism = mechanism;
  r.replicate = static_cast<long>(replicate);
  std::string msg = why;
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  r.status = "error: " + msg;
  return r;
}

void fill_common(RunRow& row, const MechanismOutcome& o, const std::vector<UserProfile>& users,
                 const ServerCostModel& m, std::size_t n_bins) {
  row.welfare = welfare(o, users, m);
  const std::vector<double> pay = user_payoffs(o, users, m);
  const std::vector<double> frac = supply_fractions(o, users);
  std::vector<double> informed_pay, informed_frac;
  std::vector<UserProfile> informed;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].informed) continue;
    informed.push_back(users[i]);
    informed_pay.push_back(pay[i]);
    informed_frac.push_back(frac[i]);
  }
  row.fairness = fairness(informed_pay);
  if (!row.fairness.valid) row.fairness = {NAN, NAN, NAN, false};
  if (informed.size() >= n_bins)
    row.supply_bins = freerider_bins(informed, informed_frac, n_bins);
  else
    row.supply_bins.assign(n_bins, NAN);
}

std::vector<RunRow> population_rows(const std::vector<std::string>& mechanisms, const ExperimentConfig& cfg,
                                    std::uint64_t replicate, double rho, double sigma) {
  std::vector<UserProfile> users;
  try {
    users = sample_population(cfg, replicate, rho);
  } catch (const std::exception& e) {
    std::vector<RunRow> rows;
    for (const auto& m : mechanisms) rows.push_back(failed_row(m, replicate, e.what()));
    return rows;
  }
  std::vector<RunRow> rows;
  for (const auto& m : mechanisms) rows.push_back(run_mechanism(m, users, cfg, replicate, sigma));
  return rows;
}

void label(std::vector<RunRow>& rows, const std::string& experiment, const std::string& cell) {
  for (auto& r : rows) {
    r.experiment = experiment;
    r.cell = cell;
  }
}

std::vector<std::string> standard_notes() {
  return {"welfare: server vs all-redeem, users vs no-redeem; payments cancel in the total",
          "payments: price at execution",
          "CIQ: terminal-round approximation of the SPNE selling path",
          "BSP: proportional rationing",
          "regret: upper bound ignoring allocation feasibility (regret_ub)"};
}

}  // namespace

std::vector<UserProfile> sample_population(const ExperimentConfig& cfg, std::uint64_t replicate, double rho) {
  Engine pop = make_stream(cfg.seed, replicate, "population");
  std::vector<UserProfile> users(cfg.users);
  for (auto& u : users) {
    u.d = cfg.endowment.draw(pop);
    u.lambda = cfg.lambda.draw(pop);
    u.theta = cfg.theta.draw(pop);
    u.k = cfg.k;
    u.validate();
  }
  Engine informed = make_stream(cfg.seed, replicate, "informed");
  assign_informed(users, rho, informed);
  return users;
}

ServerCostModel model_for(const ExperimentConfig& cfg, const std::vector<UserProfile>& users) {
  ServerCostModel m = cfg.model;
  m.d_total = 0.0;
  for (const auto& u : users) m.d_total += u.d;
  m.validate();
  return m;
}

RunRow run_mechanism(const std::string& mechanism, const std::vector<UserProfile>& users, const ExperimentConfig& cfg,
                     std::uint64_t replicate, double sigma) {
  RunRow row;
  row.mechanism = mechanism;
  row.replicate = static_cast<long>(replicate);
  try {
    const ServerCostModel m = model_for(cfg, users);
    if (mechanism == "IIQ") {
      QuotationConfig qc;
      qc.schedule = cfg.schedule;
      qc.unit = cfg.unit;
      qc.oversupply = cfg.strategy;
      qc.rng_seed = derive_seed(cfg.seed, replicate, "quotation");
      const MarketState s = run_quotation(m, users, qc);
      fill_common(row, from_market(s, users), users, m, cfg.freerider_bins);
      double total = 0.0, hi = -INFINITY, lo = INFINITY;
      for (std::size_t i = 0; i < users.size(); ++i) {
        if (!users[i].informed) continue;
        const double r = regret(i, s, users, m, cfg.schedule);
        total += r;
        hi = std::max(hi, r);
        lo = std::min(lo, r);
      }
      if (hi >= lo) {
        row.regret_total = total;
        row.regret_max = hi;
        row.regret_min = lo;
      }
      row.fulfillment = s.fulfillment();
      row.rounds = static_cast<double>(s.quotation_rounds);
    } else if (mechanism == "CIQ") {
      CiqOptions opt;
      opt.grid_step = cfg.grid_step;
      const SpneProfile p = ciq_outcome(users, cfg.schedule, m, opt);
      fill_common(row, from_profile(p, users), users, m, cfg.freerider_bins);
      row.rounds = static_cast<double>(p.terminal_round);
    } else if (mechanism == "OPP") {
      const MechanismOutcome o =
          sigma > 0.0 ? opp_noisy(users, m, {sigma, derive_seed(cfg.seed, replicate, "noise")}) : opp_solve(users, m);
      fill_common(row, o, users, m, cfg.freerider_bins);
    } else if (mechanism == "BSP") {
      fill_common(row, bsp_solve(users, m, default_bsp_grid(users, m, cfg.schedule)), users, m, cfg.freerider_bins);
    } else if (mechanism == "DNR" || mechanism == "GDPR" || mechanism == "FULL") {
      const BaselineKind kind =
          mechanism == "DNR" ? BaselineKind::DNR : (mechanism == "GDPR" ? BaselineKind::GDPR : BaselineKind::FULL);
      fill_common(row, baseline(kind, users, m), users, m, cfg.freerider_bins);
    } else {
      fail(ErrorKind::config, "unknown mechanism '" + mechanism + "'");
    }
  } catch (const std::exception& e) {
    RunRow bad = failed_row(mechanism, replicate, e.what());
    bad.supply_bins.assign(cfg.freerider_bins, NAN);
    return bad;
  }
  return row;
}

ExperimentReport run_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Task> tasks;
  for (double rho : cfg.rho) {
    for (long r = 0; r < cfg.runs; ++r) {
      tasks.push_back([&cfg, rho, r] {
        auto rows = population_rows(cfg.mechanisms, cfg, static_cast<std::uint64_t>(r), rho, 0.0);
        label(rows, "compare", cell_name("rho", rho));
        return rows;
      });
    }
  }
  return {"compare", run_tasks(tasks, cfg.workers), standard_notes()};
}

ExperimentReport run_robustness(const ExperimentConfig& cfg) {
  cfg.validate();
  const double rho = cfg.rho.front();
  std::vector<Task> tasks;
  for (double sigma : cfg.sigma) {
    for (long r = 0; r < cfg.runs; ++r) {
      tasks.push_back([&cfg, rho, sigma, r] {
        auto rows = population_rows({"OPP", "IIQ"}, cfg, static_cast<std::uint64_t>(r), rho, sigma);
        label(rows, "robustness", cell_name("sigma", sigma));
        return rows;
      });
    }
  }
  auto notes = standard_notes();
  notes.push_back("noise: common standard-normal draws per replicate scaled by sigma; estimates floored at 0");
  return {"robustness", run_tasks(tasks, cfg.workers), notes};
}

ExperimentReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const double rho = cfg.rho.front();
  std::vector<ExperimentConfig> cells;
  std::vector<std::string> names;
  for (double dB : cfg.convergence_dB) {
    ExperimentConfig c = cfg;
    c.schedule.dB = dB;
    cells.push_back(c);
    names.push_back(cell_name("dB", dB));
  }
  for (double n : cfg.convergence_users) {
    ExperimentConfig c = cfg;
    c.users = static_cast<std::size_t>(n);
    cells.push_back(c);
    names.push_back(cell_name("I", n));
  }
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (long r = 0; r < cfg.runs; ++r) {
      tasks.push_back([&cells, &names, c, rho, r] {
        auto rows = population_rows({"IIQ"}, cells[c], static_cast<std::uint64_t>(r), rho, 0.0);
        label(rows, "convergence", names[c]);
        return rows;
      });
    }
  }
  return {"convergence", run_tasks(tasks, cfg.workers), standard_notes()};
}

ExperimentReport run_oversupply(const ExperimentConfig& cfg) {
  cfg.validate();
  const double rho = cfg.rho.front();
  std::vector<ExperimentConfig> cells;
  for (auto s : {OversupplyStrategy::major_first, OversupplyStrategy::minor_first, OversupplyStrategy::proportional,
                 OversupplyStrategy::random_order}) {
    ExperimentConfig c = cfg;
    c.strategy = s;
    cells.push_back(c);
  }
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (long r = 0; r < cfg.runs; ++r) {
      tasks.push_back([&cells, c, rho, r] {
        auto rows = population_rows({"IIQ"}, cells[c], static_cast<std::uint64_t>(r), rho, 0.0);
        label(rows, "oversupply", std::string("strategy=") + to_string(cells[c].strategy));
        return rows;
      });
    }
  }
  return {"oversupply", run_tasks(tasks, cfg.workers), standard_notes()};
}

ExperimentReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_axis == "none") fail(ErrorKind::config, "sweep needs sweep.axis");
  const double rho = cfg.rho.front();
  std::vector<ExperimentConfig> cells;
  std::vector<std::string> names;
  for (const auto& v : cfg.effective_sweep_values()) {
    ExperimentConfig c = cfg;
    const std::string& axis = cfg.sweep_axis;
    if (axis == "dB")
      set_config_value(c, "schedule.dB", v);
    else if (axis == "I")
      set_config_value(c, "population.users", v);
    else if (axis == "k")
      set_config_value(c, "population.k", v);
    else if (axis == "alpha")
      set_config_value(c, "model.alpha", v);
    else if (axis == "lambda_dist")
      set_config_value(c, "population.lambda", v);
    else if (axis == "theta_dist")
      set_config_value(c, "population.theta", v);
    c.validate();
    cells.push_back(c);
    names.push_back(axis + "=" + v);
  }
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (long r = 0; r < cfg.sweep_runs; ++r) {
      tasks.push_back([&cells, &names, c, rho, r] {
        auto rows = population_rows(cells[c].mechanisms, cells[c], static_cast<std::uint64_t>(r), rho, 0.0);
        label(rows, "sweep", names[c]);
        return rows;
      });
    }
  }
  return {"sweep", run_tasks(tasks, cfg.workers), standard_notes()};
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name) {
  if (name == "compare") return run_comparison(cfg);
  if (name == "robustness") return run_robustness(cfg);
  if (name == "convergence") return run_convergence(cfg);
  if (name == "oversupply") return run_oversupply(cfg);
  if (name == "sweep") return run_sweep(cfg);
  fail(ErrorKind::config, "unknown experiment '" + name + "'");
}

}  // namespace dq
