#include "dataquote/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dataquote/error.hpp"
#include "dataquote/format.hpp"

namespace dq {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct Split {
  double base = 0.0;      // uninformed endowment
  double informed = 0.0;  // informed endowment
  double theta_sum = 0.0;
};

Split split_population(const std::vector<UserProfile>& users, const ServerCostModel& m) {
  m.validate();
  Split s;
  for (const auto& u : users) {
    u.validate();
    (u.informed ? s.informed : s.base) += u.d;
    s.theta_sum += u.theta;
  }
  return s;
}

// Welfare with users measured against no redemption and the server
// against full redemption; `jump` selects the no-retraining branch at y = d.
double planned_welfare(const std::vector<UserProfile>& users, const ServerCostModel& m, const Split& sp,
                       const std::vector<double>& alloc, double total, bool jump) {
  const double y = std::min(m.d_total, sp.base + total);
  const double cost = jump ? server_cost(m, m.d_total) : server_cost_continuous(m, y);
  double w = server_cost(m, 0.0) - cost;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].informed) continue;
    w += privacy_utility(users[i], users[i].d - alloc[i]) - privacy_utility(users[i], 0.0);
  }
  const double x = m.d_total - y;
  w -= sp.theta_sum * (accuracy_degradation(m, x) - accuracy_degradation(m, 0.0));
  return w;
}

MechanismOutcome priced_outcome(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                const std::vector<double>& alloc, const std::string& label) {
  MechanismOutcome out;
  out.mechanism = label;
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  double y = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    out.retained[i] = users[i].informed ? alloc[i] : users[i].d;
    y += out.retained[i];
  }
  const double slope = accuracy_slope(m, std::clamp(m.d_total - y, 0.0, m.d_total));
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].informed || alloc[i] <= 0.0) continue;
    const double price = std::max(0.0, privacy_marginal(users[i], users[i].d - alloc[i]) - users[i].theta * slope);
    out.payments[i] = price * alloc[i];
  }
  return out;
}

std::vector<double> supporting_prices(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                      const std::vector<double>& retained) {
  const double y = std::accumulate(retained.begin(), retained.end(), 0.0);
  const double slope = accuracy_slope(m, std::clamp(m.d_total - y, 0.0, m.d_total));
  std::vector<double> prices(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].informed) continue;
    prices[i] = std::max(0.0, privacy_marginal(users[i], users[i].d - retained[i]) - users[i].theta * slope);
  }
  return prices;
}

}  // namespace

const char* to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::DNR: return "DNR";
    case BaselineKind::GDPR: return "GDPR";
    case BaselineKind::FULL: return "FULL";
  }
  return "?";
}

std::vector<double> water_fill(const std::vector<UserProfile>& users, double total) {
  std::vector<double> alloc(users.size(), 0.0);
  double capacity = 0.0, top = 0.0;
  for (const auto& u : users) {
    if (!u.informed) continue;
    capacity += u.d;
    top = std::max(top, u.lambda);
  }
  if (total <= 0.0) return alloc;
  if (total >= capacity) {
    for (std::size_t i = 0; i < users.size(); ++i) alloc[i] = users[i].informed ? users[i].d : 0.0;
    return alloc;
  }
  // The amount a user gives up when marginal privacy may reach mu is its
  // privacy-only supply at price mu; find mu with supplies summing to total.
  auto supplied = [&](double mu, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      out[i] = users[i].informed ? user_supply(users[i], 0.0, mu) : 0.0;
      sum += out[i];
    }
    return sum;
  };
  std::vector<double> low(users.size()), high(users.size());
  double lo = 0.0, hi = top * 2.0 + 1.0;
  for (int it = 0; it < 2000 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (supplied(mid, low) < total ? lo : hi) = mid;
  }
  const double got = supplied(lo, low);
  supplied(hi, high);
  double gap_total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) gap_total += high[i] - low[i];
  const double rest = total - got;
  for (std::size_t i = 0; i < users.size(); ++i) {
    alloc[i] = low[i];
    if (gap_total > 0.0 && rest > 0.0) alloc[i] += rest * (high[i] - low[i]) / gap_total;
    alloc[i] = std::clamp(alloc[i], 0.0, users[i].d);
  }
  return alloc;
}

MechanismOutcome opp_solve(const std::vector<UserProfile>& users, const ServerCostModel& m) {
  const Split sp = split_population(users, m);
  auto value = [&](double total) { return planned_welfare(users, m, sp, water_fill(users, total), total, false); };

  double a = 0.0, b = sp.informed;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = value(c), fd = value(d);
  while (b - a > 1e-6) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = value(d);
    }
  }
  double best_total = 0.5 * (a + b);
  double best = value(best_total);
  bool jump = false;
  const double none = value(0.0);
  if (none > best) {
    best = none;
    best_total = 0.0;
  }
  if (sp.informed > 0.0) {
    const std::vector<double> all = water_fill(users, sp.informed);
    const bool reaches_full = sp.base + sp.informed >= m.d_total;
    const double full = planned_welfare(users, m, sp, all, sp.informed, reaches_full);
    if (full > best) {
      best = full;
      best_total = sp.informed;
      jump = reaches_full;
    }
  }
  MechanismOutcome out = priced_outcome(users, m, water_fill(users, best_total), "OPP");
  if (jump) out.note = "full retention";
  return out;
}

MechanismOutcome opp_noisy(const std::vector<UserProfile>& users, const ServerCostModel& m, const NoiseSpec& noise) {
  if (!(noise.sigma >= 0.0)) fail(ErrorKind::domain, "sigma must be nonnegative");
  if (noise.sigma == 0.0) {
    MechanismOutcome out = opp_solve(users, m);
    out.noisy = true;
    return out;
  }
  Engine eng(noise.seed);
  std::vector<UserProfile> estimated = users;
  for (auto& u : estimated) {
    const double e_lambda = noise.sigma * standard_normal(eng);
    const double e_theta = noise.sigma * standard_normal(eng);
    u.lambda = std::max(0.0, u.lambda * (1.0 + e_lambda));
    u.theta = std::max(0.0, u.theta * (1.0 + e_theta));
  }
  const MechanismOutcome plan = opp_solve(estimated, m);
  const std::vector<double> prices = supporting_prices(estimated, m, plan.retained);
  const std::vector<double> sold = respond_to_prices(users, prices, m);

  MechanismOutcome out;
  out.mechanism = "OPP";
  out.noisy = true;
  out.sigma = noise.sigma;
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    out.retained[i] = users[i].informed ? sold[i] : users[i].d;
    if (users[i].informed) out.payments[i] = prices[i] * sold[i];
  }
  return out;
}

std::vector<double> default_bsp_grid(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                     const PriceSchedule& schedule) {
  const Split sp = split_population(users, m);
  const double y_max = optimal_retention(m).y_max;
  std::vector<double> grid;
  for (long t = 0; t < 1'000'000; ++t) {
    const double price = schedule.price_at(t);
    if (sp.base >= y_max || server_demand(m, sp.base, price) <= 0.0) break;
    grid.push_back(price);
  }
  if (grid.empty()) grid.push_back(schedule.price_at(0));
  return grid;
}

MechanismOutcome bsp_solve(const std::vector<UserProfile>& users, const ServerCostModel& m,
                           const std::vector<double>& price_grid) {
  if (price_grid.empty()) fail(ErrorKind::precondition, "BSP needs a nonempty price grid");
  const Split sp = split_population(users, m);
  const double y_max = optimal_retention(m).y_max;
  std::vector<double> grid = price_grid;
  std::sort(grid.begin(), grid.end());

  std::vector<double> best_alloc(users.size(), 0.0);
  double best_payoff = -INFINITY, best_price = grid.front();
  for (double price : grid) {
    if (!(price > 0.0)) fail(ErrorKind::domain, "BSP prices must be positive");
    const std::vector<double> offers = respond_to_prices(users, std::vector<double>(users.size(), price), m);
    const double offered = std::accumulate(offers.begin(), offers.end(), 0.0);
    const double wanted = sp.base >= y_max ? 0.0 : server_demand(m, sp.base, price);
    const double bought = std::min(offered, wanted);
    const double payoff =
        server_cost(m, 0.0) - server_cost(m, std::min(m.d_total, sp.base + bought)) - price * bought;
    if (payoff > best_payoff) {
      best_payoff = payoff;
      best_price = price;
      for (std::size_t i = 0; i < users.size(); ++i) best_alloc[i] = offered > 0.0 ? offers[i] * bought / offered : 0.0;
    }
  }
  MechanismOutcome out;
  out.mechanism = "BSP";
  out.note = "proportional rationing";
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    out.retained[i] = users[i].informed ? best_alloc[i] : users[i].d;
    if (users[i].informed) out.payments[i] = best_price * best_alloc[i];
  }
  return out;
}

MechanismOutcome baseline(BaselineKind kind, const std::vector<UserProfile>& users, const ServerCostModel& m) {
  split_population(users, m);
  MechanismOutcome out;
  out.mechanism = to_string(kind);
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& u = users[i];
    switch (kind) {
      case BaselineKind::DNR: out.retained[i] = u.d; break;
      case BaselineKind::GDPR: out.retained[i] = u.informed ? 0.0 : u.d; break;
      case BaselineKind::FULL:
        out.retained[i] = u.d;
        if (u.informed) out.payments[i] = privacy_utility(u, u.d) - privacy_utility(u, 0.0);
        break;
    }
  }
  return out;
}

MechanismOutcome baseline(BaselineKind kind, std::vector<UserProfile> users, const ServerCostModel& m, double rho,
                          Engine& rng) {
  assign_informed(users, rho, rng);
  return baseline(kind, users, m);
}

void assign_informed(std::vector<UserProfile>& users, double rho, Engine& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorKind::domain, "informed ratio must lie in [0, 1]");
  const std::size_t n = users.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  const auto count = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n) - 1e-9));
  for (std::size_t j = 0; j < n; ++j) users[order[j]].informed = j < count;
}

MechanismOutcome from_market(const MarketState& s, const std::vector<UserProfile>& users) {
  if (s.sold.size() != users.size()) fail(ErrorKind::precondition, "market state and population differ in size");
  MechanismOutcome out;
  out.mechanism = "IIQ";
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) out.retained[i] = users[i].informed ? s.sold[i] : users[i].d;
  for (const auto& t : s.ledger) out.payments[t.user] += t.quantity * t.unit_price;
  return out;
}

MechanismOutcome from_profile(const SpneProfile& p, const std::vector<UserProfile>& users) {
  if (p.amounts.size() != users.size()) fail(ErrorKind::precondition, "profile and population differ in size");
  MechanismOutcome out;
  out.mechanism = "CIQ";
  out.note = p.note;
  out.retained.assign(users.size(), 0.0);
  out.payments.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    out.retained[i] = users[i].informed ? p.amounts[i] : users[i].d;
    if (users[i].informed) out.payments[i] = p.terminal_price * p.amounts[i];
  }
  return out;
}

void write_outcome_csv(std::ostream& out, const std::vector<MechanismOutcome>& outcomes) {
  out << "user,retained,payment,mechanism\n";
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < o.retained.size(); ++i) {
      out << i << ',' << format_number(o.retained[i]) << ',' << format_number(o.payments[i]) << ',' << o.mechanism
          << '\n';
    }
  }
}

}  // namespace dq
