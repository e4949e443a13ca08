#include "dataquote/dataquote.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "dataquote/benchmarks.hpp"
#include "dataquote/config.hpp"
#include "dataquote/econ.hpp"
#include "dataquote/error.hpp"
#include "dataquote/experiments.hpp"
#include "dataquote/metrics.hpp"
#include "dataquote/quotation.hpp"
#include "dataquote/report.hpp"

struct dq_model {
  dq::ServerCostModel model;
};

struct dq_population {
  std::vector<dq::UserProfile> users;
};

struct dq_market {
  dq::ServerCostModel model;
  std::vector<dq::UserProfile> users;
  dq::QuotationConfig config;
  dq::MarketState state;
};

struct dq_experiment {
  dq::ExperimentConfig config;
  std::vector<std::string> defaulted;
};

namespace {

thread_local std::string last_error;

dq_status fail_with(dq_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

dq_status map_kind(dq::ErrorKind k) {
  switch (k) {
    case dq::ErrorKind::domain: return DQ_ERR_DOMAIN;
    case dq::ErrorKind::precondition: return DQ_ERR_PRECONDITION;
    case dq::ErrorKind::config: return DQ_ERR_CONFIG;
    case dq::ErrorKind::convergence: return DQ_ERR_CONVERGENCE;
    case dq::ErrorKind::io: return DQ_ERR_IO;
  }
  return DQ_ERR_INTERNAL;
}

template <class F>
dq_status guarded(F&& body) {
  try {
    body();
    return DQ_OK;
  } catch (const dq::Error& e) {
    return fail_with(map_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(DQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(DQ_ERR_INTERNAL, e.what());
  }
}

double* model_field(dq::ServerCostModel& m, const char* name) {
  const std::string n = name;
  if (n == "a") return &m.a;
  if (n == "A1") return &m.A1;
  if (n == "A2") return &m.A2;
  if (n == "A3") return &m.A3;
  if (n == "T0") return &m.T0;
  if (n == "alpha") return &m.alpha;
  if (n == "beta") return &m.beta;
  if (n == "d_total") return &m.d_total;
  return nullptr;
}

#define DQ_REQUIRE(ptr)                                            \
  do {                                                             \
    if (!(ptr)) return fail_with(DQ_ERR_NULL, #ptr " is NULL");    \
  } while (0)

}  // namespace

extern "C" {

const char* dq_version(void) { return DQ_VERSION; }

const char* dq_last_error(void) { return last_error.c_str(); }

const char* dq_status_name(dq_status status) {
  switch (status) {
    case DQ_OK: return "ok";
    case DQ_ERR_NULL: return "null argument";
    case DQ_ERR_DOMAIN: return "domain error";
    case DQ_ERR_PRECONDITION: return "precondition violated";
    case DQ_ERR_CONFIG: return "configuration error";
    case DQ_ERR_CONVERGENCE: return "no convergence";
    case DQ_ERR_IO: return "i/o error";
    case DQ_ERR_RANGE: return "index out of range";
    case DQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

dq_status dq_model_create(dq_model** out) {
  DQ_REQUIRE(out);
  return guarded([&] { *out = new dq_model{}; });
}

void dq_model_destroy(dq_model* model) { delete model; }

dq_status dq_model_set(dq_model* model, const char* name, double value) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(name);
  double* f = model_field(model->model, name);
  if (!f) return fail_with(DQ_ERR_CONFIG, std::string("unknown model parameter '") + name + "'");
  const double old = *f;
  *f = value;
  return guarded([&] {
    try {
      model->model.validate();
    } catch (...) {
      *f = old;
      throw;
    }
  });
}

dq_status dq_model_get(const dq_model* model, const char* name, double* value) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(name);
  DQ_REQUIRE(value);
  double* f = model_field(const_cast<dq::ServerCostModel&>(model->model), name);
  if (!f) return fail_with(DQ_ERR_CONFIG, std::string("unknown model parameter '") + name + "'");
  *value = *f;
  return DQ_OK;
}

dq_status dq_model_cost(const dq_model* model, double retained, double* cost) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(cost);
  return guarded([&] { *cost = dq::server_cost(model->model, retained); });
}

dq_status dq_model_demand(const dq_model* model, double retained, double price, double* amount) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(amount);
  return guarded([&] { *amount = dq::server_demand(model->model, retained, price); });
}

dq_status dq_model_optimal_retention(const dq_model* model, double* y_max, int* case_label) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(y_max);
  return guarded([&] {
    const auto r = dq::optimal_retention(model->model);
    *y_max = r.y_max;
    if (case_label) *case_label = static_cast<int>(r.label);
  });
}

dq_status dq_population_create(dq_population** out) {
  DQ_REQUIRE(out);
  return guarded([&] { *out = new dq_population{}; });
}

void dq_population_destroy(dq_population* population) { delete population; }

dq_status dq_population_add(dq_population* population, double endowment, double lambda, double k, double theta,
                            int informed) {
  DQ_REQUIRE(population);
  return guarded([&] {
    dq::UserProfile u{endowment, lambda, k, theta, informed != 0};
    u.validate();
    population->users.push_back(u);
  });
}

dq_status dq_population_size(const dq_population* population, size_t* size) {
  DQ_REQUIRE(population);
  DQ_REQUIRE(size);
  *size = population->users.size();
  return DQ_OK;
}

dq_status dq_population_endowment(const dq_population* population, double* total) {
  DQ_REQUIRE(population);
  DQ_REQUIRE(total);
  double t = 0.0;
  for (const auto& u : population->users) t += u.d;
  *total = t;
  return DQ_OK;
}

dq_status dq_user_supply(const dq_population* population, size_t user, double sold, double price, double* amount) {
  DQ_REQUIRE(population);
  DQ_REQUIRE(amount);
  if (user >= population->users.size()) return fail_with(DQ_ERR_RANGE, "user index out of range");
  return guarded([&] { *amount = dq::user_supply(population->users[user], sold, price); });
}

dq_status dq_market_run(const dq_model* model, const dq_population* population, double B0, double dB, double unit,
                        dq_strategy strategy, uint64_t seed, dq_market** out) {
  DQ_REQUIRE(model);
  DQ_REQUIRE(population);
  DQ_REQUIRE(out);
  if (strategy < DQ_STRATEGY_MAJOR || strategy > DQ_STRATEGY_RANDOM) return fail_with(DQ_ERR_CONFIG, "unknown strategy");
  return guarded([&] {
    auto m = std::make_unique<dq_market>();
    m->model = model->model;
    m->users = population->users;
    m->config.schedule = {B0, dB};
    m->config.unit = unit;
    m->config.oversupply = static_cast<dq::OversupplyStrategy>(strategy);
    m->config.rng_seed = seed;
    m->state = dq::run_quotation(m->model, m->users, m->config);
    *out = m.release();
  });
}

void dq_market_destroy(dq_market* market) { delete market; }

dq_status dq_market_trade_count(const dq_market* market, size_t* count) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(count);
  *count = market->state.ledger.size();
  return DQ_OK;
}

dq_status dq_market_trade(const dq_market* market, size_t index, dq_trade* trade) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(trade);
  if (index >= market->state.ledger.size()) return fail_with(DQ_ERR_RANGE, "trade index out of range");
  const auto& t = market->state.ledger[index];
  *trade = dq_trade{t.round, t.user, t.quantity, t.unit_price};
  return DQ_OK;
}

dq_status dq_market_total_sold(const dq_market* market, double* total) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(total);
  *total = market->state.total_sold;
  return DQ_OK;
}

dq_status dq_market_rounds(const dq_market* market, long* rounds) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(rounds);
  *rounds = market->state.quotation_rounds;
  return DQ_OK;
}

dq_status dq_market_fulfillment(const dq_market* market, double* ratio) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(ratio);
  *ratio = market->state.fulfillment();
  return DQ_OK;
}

dq_status dq_market_welfare(const dq_market* market, dq_welfare* out) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(out);
  return guarded([&] {
    const auto w = dq::welfare(dq::from_market(market->state, market->users), market->users, market->model);
    *out = dq_welfare{w.server, w.users, w.total, w.transfer_free};
  });
}

dq_status dq_market_write_ledger(const dq_market* market, const char* path) {
  DQ_REQUIRE(market);
  DQ_REQUIRE(path);
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) dq::fail(dq::ErrorKind::io, std::string("cannot write '") + path + "'");
    dq::write_ledger_csv(out, market->state.ledger);
  });
}

dq_status dq_experiment_load(const char* path, dq_experiment** out) {
  DQ_REQUIRE(out);
  return guarded([&] {
    auto e = std::make_unique<dq_experiment>();
    auto parsed = path ? dq::parse_config_file(path) : dq::parse_config_text("");
    e->config = parsed.config;
    e->defaulted = parsed.defaulted;
    *out = e.release();
  });
}

void dq_experiment_destroy(dq_experiment* experiment) { delete experiment; }

dq_status dq_experiment_set(dq_experiment* experiment, const char* key, const char* value) {
  DQ_REQUIRE(experiment);
  DQ_REQUIRE(key);
  DQ_REQUIRE(value);
  return guarded([&] {
    dq::ExperimentConfig next = experiment->config;
    dq::set_config_value(next, key, value);
    next.validate();
    experiment->config = next;
    std::erase(experiment->defaulted, std::string(key));
  });
}

dq_status dq_experiment_defaulted_count(const dq_experiment* experiment, size_t* count) {
  DQ_REQUIRE(experiment);
  DQ_REQUIRE(count);
  *count = experiment->defaulted.size();
  return DQ_OK;
}

dq_status dq_experiment_defaulted_key(const dq_experiment* experiment, size_t index, const char** key) {
  DQ_REQUIRE(experiment);
  DQ_REQUIRE(key);
  if (index >= experiment->defaulted.size()) return fail_with(DQ_ERR_RANGE, "defaulted key index out of range");
  *key = experiment->defaulted[index].c_str();
  return DQ_OK;
}

dq_status dq_experiment_run(const dq_experiment* experiment, const char* name, const char* out_dir) {
  DQ_REQUIRE(experiment);
  DQ_REQUIRE(name);
  return guarded([&] {
    const auto report = dq::run_experiment(experiment->config, name);
    dq::emit_report(report, experiment->config, out_dir ? out_dir : experiment->config.output);
  });
}

dq_status dq_experiment_ledger(const dq_experiment* experiment, long replicate, const char* out_dir) {
  DQ_REQUIRE(experiment);
  if (replicate < 0) return fail_with(DQ_ERR_DOMAIN, "replicate must be nonnegative");
  return guarded([&] {
    const auto& cfg = experiment->config;
    cfg.validate();
    const std::filesystem::path dir(out_dir ? out_dir : cfg.output);
    std::filesystem::create_directories(dir);
    const auto rep = static_cast<std::uint64_t>(replicate);
    const auto users = dq::sample_population(cfg, rep, cfg.rho.front());
    const auto model = dq::model_for(cfg, users);

    dq::QuotationConfig qc;
    qc.schedule = cfg.schedule;
    qc.unit = cfg.unit;
    qc.oversupply = cfg.strategy;
    qc.rng_seed = dq::derive_seed(cfg.seed, rep, "quotation");
    const auto state = dq::run_quotation(model, users, qc);
    {
      std::ofstream out(dir / "ledger.csv", std::ios::binary);
      dq::write_ledger_csv(out, state.ledger);
    }

    dq::CiqOptions opt;
    opt.grid_step = cfg.grid_step;
    const auto prof = dq::ciq_outcome(users, cfg.schedule, model, opt);
    std::vector<dq::Trade> synthetic;
    for (std::size_t i : prof.order)
      if (prof.amounts[i] > 0.0) synthetic.push_back({prof.periods[i], i, prof.amounts[i], prof.terminal_price});
    {
      std::ofstream out(dir / "ledger_ciq.csv", std::ios::binary);
      dq::write_ledger_csv(out, synthetic);
    }

    std::vector<dq::MechanismOutcome> outcomes;
    for (const auto& m : cfg.mechanisms) {
      if (m == "IIQ") outcomes.push_back(dq::from_market(state, users));
      else if (m == "CIQ") outcomes.push_back(dq::from_profile(prof, users));
      else if (m == "OPP") outcomes.push_back(dq::opp_solve(users, model));
      else if (m == "BSP") outcomes.push_back(dq::bsp_solve(users, model, dq::default_bsp_grid(users, model, cfg.schedule)));
      else if (m == "DNR") outcomes.push_back(dq::baseline(dq::BaselineKind::DNR, users, model));
      else if (m == "GDPR") outcomes.push_back(dq::baseline(dq::BaselineKind::GDPR, users, model));
      else if (m == "FULL") outcomes.push_back(dq::baseline(dq::BaselineKind::FULL, users, model));
    }
    std::ofstream out(dir / "outcomes.csv", std::ios::binary);
    dq::write_outcome_csv(out, outcomes);
  });
}

}  // extern "C"
