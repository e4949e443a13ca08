#include "dataquote/quotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dataquote/error.hpp"
#include "dataquote/format.hpp"

namespace dq {

const char* to_string(OversupplyStrategy s) {
  switch (s) {
    case OversupplyStrategy::major_first: return "major";
    case OversupplyStrategy::minor_first: return "minor";
    case OversupplyStrategy::proportional: return "prop";
    case OversupplyStrategy::random_order: return "random";
  }
  return "?";
}

OversupplyStrategy parse_strategy(const std::string& name) {
  if (name == "major") return OversupplyStrategy::major_first;
  if (name == "minor") return OversupplyStrategy::minor_first;
  if (name == "prop") return OversupplyStrategy::proportional;
  if (name == "random") return OversupplyStrategy::random_order;
  fail(ErrorKind::config, "unknown oversupply strategy '" + name + "' (major|minor|prop|random)");
}

double MarketState::fulfillment() const {
  // Nothing demanded means nothing left unmet.
  if (initial_demand <= 0.0) return 1.0;
  return total_sold / initial_demand;
}

double floor_to_unit(double v, double unit) {
  if (v <= 0.0) return 0.0;
  return std::floor(v / unit) * unit;
}

std::vector<double> allocate_oversupply(const std::vector<double>& supplies, double demand,
                                        OversupplyStrategy strategy, double unit, Engine& rng) {
  const double offered = std::accumulate(supplies.begin(), supplies.end(), 0.0);
  if (!(demand >= 0.0) || !(offered > demand)) {
    fail(ErrorKind::precondition, "oversupply allocation needs total supply > demand >= 0");
  }
  const std::size_t n = supplies.size();
  const double target = floor_to_unit(demand, unit);
  std::vector<double> alloc(n, 0.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (strategy == OversupplyStrategy::proportional) {
    std::vector<double> frac(n, 0.0);
    double given = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double raw_units = target / unit * supplies[i] / offered;
      const double whole = std::floor(raw_units);
      alloc[i] = whole * unit;
      frac[i] = raw_units - whole;
      given += alloc[i];
    }
    long residue = std::lround((target - given) / unit);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return frac[l] > frac[r]; });
    for (std::size_t i : order) {
      if (residue <= 0) break;
      if (alloc[i] + unit <= supplies[i]) {
        alloc[i] += unit;
        --residue;
      }
    }
    return alloc;
  }

  switch (strategy) {
    case OversupplyStrategy::major_first:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t l, std::size_t r) { return supplies[l] > supplies[r]; });
      break;
    case OversupplyStrategy::minor_first:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t l, std::size_t r) { return supplies[l] < supplies[r]; });
      break;
    case OversupplyStrategy::random_order:
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
      break;
    case OversupplyStrategy::proportional: break;
  }
  double left = target;
  for (std::size_t i : order) {
    const double take = std::min(supplies[i], left);
    alloc[i] = take;
    left -= take;
    if (left <= 0.0) break;
  }
  return alloc;
}

namespace {

void check_population(const ServerCostModel& model, const std::vector<UserProfile>& users) {
  model.validate();
  double total = 0.0;
  for (const auto& u : users) {
    u.validate();
    total += u.d;
  }
  if (std::abs(total - model.d_total) > 1e-9 * std::max(1.0, model.d_total)) {
    fail(ErrorKind::domain, "sum of user endowments differs from model.d_total");
  }
}

void record(MarketState& s, long round, std::size_t user, double qty, double price) {
  s.ledger.push_back({round, user, qty, price});
  s.sold[user] += qty;
  s.total_sold += qty;
}

}  // namespace

MarketState run_quotation(const ServerCostModel& model, const std::vector<UserProfile>& users,
                          const QuotationConfig& config) {
  check_population(model, users);
  config.schedule.validate();
  if (!(config.unit > 0.0)) fail(ErrorKind::domain, "unit must be positive");

  MarketState s;
  s.sold.assign(users.size(), 0.0);
  for (const auto& u : users)
    if (!u.informed) s.retained_base += u.d;

  const double y_max = optimal_retention(model).y_max;
  std::vector<double> offers(users.size(), 0.0);
  long t = 0;
  for (;; ++t) {
    const double price = config.schedule.price_at(t);
    const double y = s.retained();
    const double demand = y >= y_max ? 0.0 : floor_to_unit(server_demand(model, y, price), config.unit);
    if (t == 0) s.initial_demand = demand;
    if (demand <= 0.0 || t >= config.max_rounds) break;

    double offered = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      offers[i] = users[i].informed ? floor_to_unit(user_supply(users[i], s.sold[i], price), config.unit) : 0.0;
      offered += offers[i];
    }
    if (offered <= demand) {
      for (std::size_t i = 0; i < users.size(); ++i)
        if (offers[i] > 0.0) record(s, t, i, offers[i], price);
    } else {
      Engine rng = make_stream(config.rng_seed, static_cast<std::uint64_t>(t), "oversupply");
      const auto alloc = allocate_oversupply(offers, demand, config.oversupply, config.unit, rng);
      for (std::size_t i = 0; i < users.size(); ++i)
        if (alloc[i] > 0.0) record(s, t, i, alloc[i], price);
    }
  }
  s.quotation_rounds = t;
  s.round = t;
  s.price = config.schedule.price_at(t);

  if (y_max < model.d_total) post_quotation(s, model, users, config);
  s.phase = Phase::terminated;
  return s;
}

void post_quotation(MarketState& s, const ServerCostModel& model, const std::vector<UserProfile>& users,
                    const QuotationConfig& config) {
  s.phase = Phase::post_quotation;
  const double d = model.d_total;
  const double y = s.retained();
  if (y >= d) return;
  const double saving = server_cost(model, y) - server_cost(model, d);
  if (saving <= 0.0) return;

  for (long t = s.round; t < config.max_rounds; ++t) {
    const double price = config.schedule.price_at(t);
    s.round = t;
    s.price = price;
    if (price * (d - y) > saving) return;
    bool everyone = true;
    for (std::size_t i = 0; i < users.size() && everyone; ++i) {
      if (!users[i].informed) continue;
      const double left = users[i].d - s.sold[i];
      if (left > 0.0 && user_supply(users[i], s.sold[i], price) != left) everyone = false;
    }
    if (everyone) {
      for (std::size_t i = 0; i < users.size(); ++i) {
        const double left = users[i].d - s.sold[i];
        if (users[i].informed && left > 0.0) record(s, t, i, left, price);
      }
      return;
    }
  }
}

void write_ledger_csv(std::ostream& out, const std::vector<Trade>& ledger) {
  out << "round,user,quantity,unit_price\n";
  for (const auto& tr : ledger) {
    out << tr.round << ',' << tr.user << ',' << format_number(tr.quantity) << ','
        << format_number(tr.unit_price) << '\n';
  }
}

}  // namespace dq
