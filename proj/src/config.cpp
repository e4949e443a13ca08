#include "dataquote/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dataquote/error.hpp"
#include "dataquote/format.hpp"

namespace dq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double to_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    fail(ErrorKind::config, "key '" + key + "': malformed number '" + t + "'");
  }
  return v;
}

long to_integer(const std::string& text, const std::string& key) {
  const double v = to_number(text, key);
  if (v != std::floor(v) || std::abs(v) > 9e15) fail(ErrorKind::config, "key '" + key + "': expected an integer");
  return static_cast<long>(v);
}

std::vector<double> to_numbers(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_number(part, key));
  if (out.empty()) fail(ErrorKind::config, "key '" + key + "': list must be nonempty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : std::string()) + v[i];
  return s;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define NUM_FIELD(member)                                                                                  \
  Field {                                                                                                  \
    [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.member = to_number(v, k); },   \
        [](const ExperimentConfig& c) { return format_number(c.member); }                                  \
  }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"population.users",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          const long n = to_integer(v, k);
          if (n < 1) fail(ErrorKind::config, "key '" + k + "': need at least one user");
          c.users = static_cast<std::size_t>(n);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.users); }}},
      {"population.endowment",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.endowment = DistSpec::parse(v); },
        [](const ExperimentConfig& c) { return c.endowment.str(); }}},
      {"population.lambda",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.lambda = DistSpec::parse(v); },
        [](const ExperimentConfig& c) { return c.lambda.str(); }}},
      {"population.theta",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.theta = DistSpec::parse(v); },
        [](const ExperimentConfig& c) { return c.theta.str(); }}},
      {"population.k", NUM_FIELD(k)},
      {"mechanisms",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          static const std::set<std::string> known{"IIQ", "CIQ", "OPP", "BSP", "DNR", "GDPR", "FULL"};
          auto list = split(v, ',');
          for (const auto& m : list)
            if (!known.count(m)) fail(ErrorKind::config, "key '" + k + "': unknown mechanism '" + m + "'");
          if (list.empty()) fail(ErrorKind::config, "key '" + k + "': list must be nonempty");
          c.mechanisms = list;
        },
        [](const ExperimentConfig& c) { return join(c.mechanisms, ','); }}},
      {"rho",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) { c.rho = to_numbers(v, k); },
        [](const ExperimentConfig& c) { return join(c.rho); }}},
      {"sigma",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sigma = to_numbers(v, k); },
        [](const ExperimentConfig& c) { return join(c.sigma); }}},
      {"sweep.axis",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          static const std::set<std::string> known{"none", "dB", "I", "lambda_dist", "theta_dist", "k", "alpha"};
          if (!known.count(trim(v))) fail(ErrorKind::config, "key '" + k + "': unknown sweep axis '" + v + "'");
          c.sweep_axis = trim(v);
        },
        [](const ExperimentConfig& c) { return c.sweep_axis; }}},
      {"sweep.values",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.sweep_values = split(v, ';'); },
        [](const ExperimentConfig& c) { return join(c.sweep_values, ';'); }}},
      {"sweep.runs",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep_runs = to_integer(v, k); },
        [](const ExperimentConfig& c) { return std::to_string(c.sweep_runs); }}},
      {"convergence.dB",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) { c.convergence_dB = to_numbers(v, k); },
        [](const ExperimentConfig& c) { return join(c.convergence_dB); }}},
      {"convergence.users",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          c.convergence_users = to_numbers(v, k);
        },
        [](const ExperimentConfig& c) { return join(c.convergence_users); }}},
      {"runs",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) { c.runs = to_integer(v, k); },
        [](const ExperimentConfig& c) { return std::to_string(c.runs); }}},
      {"seed",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          const long s = to_integer(v, k);
          if (s < 0) fail(ErrorKind::config, "key '" + k + "': seed must be nonnegative");
          c.seed = static_cast<std::uint64_t>(s);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"strategy",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.strategy = parse_strategy(trim(v)); },
        [](const ExperimentConfig& c) { return std::string(to_string(c.strategy)); }}},
      {"schedule.B0", NUM_FIELD(schedule.B0)},
      {"schedule.dB", NUM_FIELD(schedule.dB)},
      {"unit", NUM_FIELD(unit)},
      {"model.a", NUM_FIELD(model.a)},
      {"model.A1", NUM_FIELD(model.A1)},
      {"model.A2", NUM_FIELD(model.A2)},
      {"model.A3", NUM_FIELD(model.A3)},
      {"model.T0", NUM_FIELD(model.T0)},
      {"model.alpha", NUM_FIELD(model.alpha)},
      {"model.beta", NUM_FIELD(model.beta)},
      {"ciq.grid_step", NUM_FIELD(grid_step)},
      {"freerider.bins",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          const long n = to_integer(v, k);
          if (n < 1) fail(ErrorKind::config, "key '" + k + "': need at least one bin");
          c.freerider_bins = static_cast<std::size_t>(n);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.freerider_bins); }}},
      {"workers",
       {[](ExperimentConfig& c, const std::string& v, const std::string& k) {
          const long n = to_integer(v, k);
          if (n < 1) fail(ErrorKind::config, "key '" + k + "': need at least one worker");
          c.workers = static_cast<unsigned>(n);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.workers); }}},
      {"output",
       {[](ExperimentConfig& c, const std::string& v, const std::string&) { c.output = trim(v); },
        [](const ExperimentConfig& c) { return c.output; }}},
  };
  return table;
}

#undef NUM_FIELD

const Field* find_field(const std::string& key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

}  // namespace

DistSpec DistSpec::parse(const std::string& raw) {
  const std::string text = trim(raw);
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    fail(ErrorKind::config, "malformed distribution '" + text + "' (expected family(params))");
  }
  const std::string name = trim(text.substr(0, open));
  std::vector<double> params;
  for (const auto& p : split(text.substr(open + 1, text.size() - open - 2), ',')) params.push_back(to_number(p, name));
  DistSpec d;
  d.params = params;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      fail(ErrorKind::config, "distribution '" + text + "' has the wrong number of parameters");
  };
  if (name == "constant") {
    need(1, 1);
    d.family = Family::constant;
  } else if (name == "uniform") {
    need(2, 2);
    if (!(params[1] >= params[0])) fail(ErrorKind::config, "uniform needs lo <= hi in '" + text + "'");
    d.family = Family::uniform;
  } else if (name == "bimodal") {
    need(4, 5);
    if (params.size() == 4) d.params.push_back(0.5);
    if (!(d.params[4] >= 0.0 && d.params[4] <= 1.0)) fail(ErrorKind::config, "bimodal weight must lie in [0, 1]");
    d.family = Family::bimodal;
  } else if (name == "pareto") {
    need(2, 2);
    if (!(params[0] > 0.0 && params[1] > 0.0)) fail(ErrorKind::config, "pareto needs positive shape and scale");
    d.family = Family::pareto;
  } else {
    fail(ErrorKind::config, "unknown distribution family '" + name + "'");
  }
  return d;
}

std::string DistSpec::str() const {
  const char* name = "constant";
  switch (family) {
    case Family::constant: name = "constant"; break;
    case Family::uniform: name = "uniform"; break;
    case Family::bimodal: name = "bimodal"; break;
    case Family::pareto: name = "pareto"; break;
  }
  return std::string(name) + "(" + join(params) + ")";
}

double DistSpec::draw(Engine& eng) const {
  switch (family) {
    case Family::constant: return params[0];
    case Family::uniform: return uniform(eng, params[0], params[1]);
    case Family::bimodal: {
      const double pick = uniform01(eng);
      const double v = uniform01(eng);
      return pick < params[4] ? params[0] + (params[1] - params[0]) * v : params[2] + (params[3] - params[2]) * v;
    }
    case Family::pareto: {
      const double u = 1.0 - uniform01(eng);  // (0, 1]
      return params[1] / std::pow(u, 1.0 / params[0]);
    }
  }
  return 0.0;
}

double DistSpec::mean() const {
  switch (family) {
    case Family::constant: return params[0];
    case Family::uniform: return 0.5 * (params[0] + params[1]);
    case Family::bimodal:
      return params[4] * 0.5 * (params[0] + params[1]) + (1.0 - params[4]) * 0.5 * (params[2] + params[3]);
    case Family::pareto: return params[0] > 1.0 ? params[0] * params[1] / (params[0] - 1.0) : INFINITY;
  }
  return 0.0;
}

void ExperimentConfig::validate() const {
  if (runs < 1) fail(ErrorKind::config, "runs must be at least 1");
  if (sweep_runs < 1) fail(ErrorKind::config, "sweep.runs must be at least 1");
  if (rho.empty() || sigma.empty() || mechanisms.empty()) fail(ErrorKind::config, "grids must be nonempty");
  for (double r : rho)
    if (!(r >= 0.0 && r <= 1.0)) fail(ErrorKind::config, "rho values must lie in [0, 1]");
  for (double s : sigma)
    if (!(s >= 0.0)) fail(ErrorKind::config, "sigma values must be nonnegative");
  for (double v : convergence_dB)
    if (!(v > 0.0)) fail(ErrorKind::config, "convergence.dB values must be positive");
  for (double v : convergence_users)
    if (!(v >= 1.0 && v == std::floor(v))) fail(ErrorKind::config, "convergence.users values must be positive integers");
  if (!(k >= 0.0 && k <= 1.0)) fail(ErrorKind::config, "population.k must lie in [0, 1]");
  if (!(unit > 0.0)) fail(ErrorKind::config, "unit must be positive");
  if (!(grid_step > 0.0)) fail(ErrorKind::config, "ciq.grid_step must be positive");
  try {
    schedule.validate();
    ServerCostModel probe = model;
    probe.d_total = 1.0;
    probe.validate();
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
}

std::vector<std::string> ExperimentConfig::effective_sweep_values() const {
  if (!sweep_values.empty()) return sweep_values;
  if (sweep_axis == "dB") return {"0.0005", "0.001", "0.002", "0.005"};
  if (sweep_axis == "I") return {"5", "10", "20", "50"};
  if (sweep_axis == "k") return {"0", "0.25", "0.5", "0.75", "1"};
  if (sweep_axis == "alpha") return {"500", "1000", "1500", "3000", "10000"};
  if (sweep_axis == "lambda_dist") return {"uniform(0.5,30)", "bimodal(0.5,5,25,30,0.5)", "pareto(1.5,0.5)"};
  if (sweep_axis == "theta_dist") return {"constant(0)", "uniform(0,5)", "uniform(0,10)"};
  return {};
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) fail(ErrorKind::config, "unknown key '" + key + "'");
  f->set(cfg, value, key);
}

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
  ParsedConfig out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) fail(ErrorKind::config, where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key)) fail(ErrorKind::config, where + "duplicate key '" + key + "'");
    try {
      set_config_value(out.config, key, value);
    } catch (const Error& e) {
      fail(ErrorKind::config, where + e.what());
    }
    seen.insert(key);
  }
  for (const auto& [name, f] : fields())
    if (!seen.count(name)) out.defaulted.push_back(name);
  out.config.validate();
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(cfg) + "\n";
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

}  // namespace dq
