#include "dataquote/equilibrium.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numeric>

#include "dataquote/error.hpp"

namespace dq {

namespace {

constexpr double kRootTol = 1e-6;

double redeemed_amount(const ServerCostModel& m, double retained) { return std::clamp(m.d_total - retained, 0.0, m.d_total); }

// Stage problem of one user: choose y in [0, cap] given predecessors s and a
// downstream aggregate G(.) that reacts to s + y.
template <class Down>
double solve_stage(const UserProfile& u, double s, double price, const ServerCostModel& m, const ChainContext& ctx,
                   Down& down) {
  const double cap = std::min(u.d, std::max(0.0, ctx.limit - s));
  if (cap <= 0.0) return 0.0;
  const double privacy_only = std::min(user_supply(u, 0.0, price), cap);
  if (u.theta == 0.0) return privacy_only;

  auto slope = [&](double y) {
    const double after = s + y;
    const double x = redeemed_amount(m, ctx.base + after + down.value(after));
    return -privacy_marginal(u, u.d - y) + price + u.theta * accuracy_slope(m, x) * (1.0 + down.slope(after));
  };

  if (!down.active()) {
    double lo = 0.0, hi = cap;
    if (slope(lo) <= 0.0) return 0.0;
    if (slope(hi) >= 0.0) return cap;
    while (hi - lo > kRootTol) {
      const double mid = 0.5 * (lo + hi);
      const double g = slope(mid);
      if (std::abs(g) <= 1e-9 * price) return mid;
      (g > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Bracket by expanding away from the privacy-only answer; the accuracy
  // term only shifts the root by a few units, so the tables are touched
  // in a narrow window.
  double a = privacy_only;
  double ga = slope(a);
  if (ga == 0.0) return a;
  const bool up = ga > 0.0;
  if (up && a >= cap) return cap;
  if (!up && a <= 0.0) return 0.0;
  double step = 1.0;
  double b, gb;
  for (;;) {
    b = up ? std::min(cap, a + step) : std::max(0.0, a - step);
    gb = slope(b);
    if ((gb > 0.0) != up || gb == 0.0) break;
    if (b == (up ? cap : 0.0)) return b;
    a = b;
    ga = gb;
    step *= 2.0;
  }
  if (gb == 0.0) return b;
  double lo = up ? a : b, hi = up ? b : a;
  double glo = up ? ga : gb, ghi = up ? gb : ga;
  std::uintmax_t iters = 200;
  auto tol = [](double l, double r) { return std::abs(r - l) <= kRootTol; };
  auto res = boost::math::tools::toms748_solve(slope, lo, hi, glo, ghi, tol, iters);
  return 0.5 * (res.first + res.second);
}

struct NoDownstream {
  bool active() const { return false; }
  double value(double) const { return 0.0; }
  double slope(double) const { return 0.0; }
};

struct TableDownstream {
  const ResponseTable* table;
  bool active() const { return table != nullptr; }
  double value(double s) const { return table ? table->aggregate_at(s) : 0.0; }
  double slope(double s) const {
    if (!table || table->grid.size() < 2 || s >= table->grid.back()) return 0.0;
    const auto& g = table->grid;
    std::size_t j = std::min(static_cast<std::size_t>(std::max(0.0, s) / table->step), g.size() - 2);
    while (j + 1 < g.size() - 1 && g[j + 1] <= s) ++j;
    return (table->aggregate[j + 1] - table->aggregate[j]) / (g[j + 1] - g[j]);
  }
};

std::size_t segment_of(const std::vector<double>& grid, double step, double s) {
  std::size_t j = std::min(static_cast<std::size_t>(std::max(0.0, s) / step), grid.size() - 2);
  while (j + 1 < grid.size() - 1 && grid[j + 1] <= s) ++j;
  return j;
}

std::vector<double> make_grid(double span, double step) {
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::ceil(span / step));
  g.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) g.push_back(static_cast<double>(k) * step);
  g.push_back(span);
  if (g.size() >= 2 && g[g.size() - 2] >= span) g.erase(g.end() - 2);
  return g;
}

// Backward-induction chain whose response tables are filled on demand.
// Every node is a pure function of its position and grid point, so the
// lazily built tables equal eagerly built ones.
class Chain {
 public:
  Chain(const std::vector<UserProfile>& users, const std::vector<std::size_t>& order, const std::vector<double>& prices,
        const ServerCostModel& m, double step, const ChainContext& ctx)
      : users_(users), order_(order), prices_(prices), m_(m), ctx_(ctx), step_(step) {
    double span = 0.0;
    for (std::size_t i : order) span += users[i].d;
    span = std::min(span, ctx.limit);
    grid_ = make_grid(std::max(0.0, span), step);
    resp_.assign(order.size(), std::vector<double>(grid_.size(), NAN));
    agg_.assign(order.size(), std::vector<double>(grid_.size(), NAN));
  }

  double respond(std::size_t p, double s) {
    Lazy down{this, p + 1};
    return solve_stage(users_[order_[p]], s, prices_[p], m_, ctx_, down);
  }

  double value(std::size_t p, double s) {
    if (p >= order_.size()) return 0.0;
    if (grid_.size() == 1) return node(p, 0);
    if (s >= grid_.back()) return node(p, grid_.size() - 1);
    if (s <= 0.0) return node(p, 0);
    const std::size_t j = segment_of(grid_, step_, s);
    const double w = (s - grid_[j]) / (grid_[j + 1] - grid_[j]);
    return (1.0 - w) * node(p, j) + w * node(p, j + 1);
  }

  double slope(std::size_t p, double s) {
    if (p >= order_.size() || grid_.size() < 2 || s >= grid_.back()) return 0.0;
    const std::size_t j = segment_of(grid_, step_, s);
    return (node(p, j + 1) - node(p, j)) / (grid_[j + 1] - grid_[j]);
  }

  ResponseTable table(std::size_t p) {
    ResponseTable t;
    t.user = order_[p];
    t.step = step_;
    t.grid = grid_;
    for (std::size_t k = 0; k < grid_.size(); ++k) node(p, k);
    t.response = resp_[p];
    t.aggregate = agg_[p];
    return t;
  }

 private:
  struct Lazy {
    Chain* chain;
    std::size_t p;
    bool active() const { return p < chain->order_.size(); }
    double value(double s) const { return chain->value(p, s); }
    double slope(double s) const { return chain->slope(p, s); }
  };

  double node(std::size_t p, std::size_t k) {
    double& a = agg_[p][k];
    if (std::isnan(a)) {
      const double s = grid_[k];
      const double y = respond(p, s);
      resp_[p][k] = y;
      a = y + value(p + 1, s + y);
    }
    return a;
  }

  const std::vector<UserProfile>& users_;
  const std::vector<std::size_t>& order_;
  const std::vector<double>& prices_;
  const ServerCostModel& m_;
  ChainContext ctx_;
  double step_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> resp_, agg_;
};

}  // namespace

double ResponseTable::aggregate_at(double s) const {
  if (grid.empty()) return 0.0;
  if (grid.size() == 1 || s <= 0.0) return aggregate.front();
  if (s >= grid.back()) return aggregate.back();
  const std::size_t j = segment_of(grid, step, s);
  const double w = (s - grid[j]) / (grid[j + 1] - grid[j]);
  return (1.0 - w) * aggregate[j] + w * aggregate[j + 1];
}

double ResponseTable::response_at(double s) const {
  if (grid.empty()) return 0.0;
  if (grid.size() == 1 || s <= 0.0) return response.front();
  if (s >= grid.back()) return response.back();
  const std::size_t j = segment_of(grid, step, s);
  const double w = (s - grid[j]) / (grid[j + 1] - grid[j]);
  return (1.0 - w) * response[j] + w * response[j + 1];
}

double marginal_payoff(const UserProfile& u, double y, double others, double price, const ServerCostModel& m) {
  if (!(y >= 0.0 && y <= u.d)) fail(ErrorKind::domain, "own amount outside [0, d_i]");
  const double x = redeemed_amount(m, y + others);
  return -privacy_marginal(u, u.d - y) + u.theta * accuracy_slope(m, x) + price;
}

double stage_payoff(const UserProfile& u, double y, double others, double price, const ServerCostModel& m) {
  if (!(y >= 0.0 && y <= u.d)) fail(ErrorKind::domain, "own amount outside [0, d_i]");
  const double x = redeemed_amount(m, y + others);
  return privacy_utility(u, u.d - y) + price * y - u.theta * accuracy_degradation(m, x);
}

double best_response(const UserProfile& u, double s, double price, const ServerCostModel& m,
                     const ResponseTable* downstream, const ChainContext& ctx) {
  u.validate();
  if (downstream) {
    TableDownstream down{downstream};
    return solve_stage(u, s, price, m, ctx, down);
  }
  NoDownstream none;
  return solve_stage(u, s, price, m, ctx, none);
}

BackwardInductionResult backward_induction(const std::vector<UserProfile>& users, const std::vector<std::size_t>& order,
                                           const std::vector<double>& prices, const ServerCostModel& m,
                                           double grid_step, const ChainContext& ctx, bool materialize) {
  if (!(grid_step > 0.0)) fail(ErrorKind::domain, "grid_step must be positive");
  if (prices.size() != order.size()) fail(ErrorKind::precondition, "one price per position required");
  for (std::size_t i : order) {
    if (i >= users.size()) fail(ErrorKind::precondition, "order refers to an unknown user");
    users[i].validate();
  }

  BackwardInductionResult out;
  SpneProfile& prof = out.profile;
  prof.order = order;
  prof.periods.assign(users.size(), -1);
  prof.amounts.assign(users.size(), 0.0);
  prof.cumulative.assign(order.size(), 0.0);

  const bool coupled = std::any_of(order.begin(), order.end(), [&](std::size_t i) { return users[i].theta > 0.0; });
  const std::size_t n = order.size();
  if (!coupled) {
    // No externality: each user answers the residual cap alone.
    double s = 0.0;
    NoDownstream none;
    for (std::size_t p = 0; p < n; ++p) {
      const double y = solve_stage(users[order[p]], s, prices[p], m, ctx, none);
      prof.amounts[order[p]] = y;
      s += y;
      prof.cumulative[p] = s;
    }
    return out;
  }

  Chain chain(users, order, prices, m, grid_step, ctx);
  double s = 0.0;
  std::vector<double> before(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    before[p] = s;
    const double y = chain.respond(p, s);
    prof.amounts[order[p]] = y;
    s += y;
    prof.cumulative[p] = s;
  }
  for (std::size_t p = 1; p < n; ++p) {
    const double predicted = chain.value(p, before[p]);
    const double actual = s - before[p];
    prof.max_residual = std::max(prof.max_residual, std::abs(predicted - actual));
  }
  if (prof.max_residual > 4.0 * grid_step + 1.0) {
    fail(ErrorKind::convergence, "response table too coarse (residual " + std::to_string(prof.max_residual) +
                                     "); use a smaller grid_step");
  }
  if (materialize) {
    for (std::size_t p = 0; p < n; ++p) out.tables.push_back(chain.table(p));
  }
  return out;
}

double theta_adjusted_reservation(const UserProfile& u, const ServerCostModel& m, double base) {
  const double x = redeemed_amount(m, base);
  return privacy_marginal(u, u.d) - u.theta * accuracy_slope(m, x);
}

SpneProfile ciq_outcome(const std::vector<UserProfile>& users, const PriceSchedule& schedule, const ServerCostModel& m,
                        const CiqOptions& opt) {
  m.validate();
  schedule.validate();
  double base = 0.0;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < users.size(); ++i) {
    users[i].validate();
    if (!users[i].informed)
      base += users[i].d;
    else if (users[i].d > 0.0)
      order.push_back(i);
  }
  std::vector<double> key(users.size(), 0.0);
  for (std::size_t i : order) key[i] = theta_adjusted_reservation(users[i], m, base);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return key[l] < key[r]; });

  const double y_max = optimal_retention(m).y_max;
  auto demand = [&](long t) { return base >= y_max ? 0.0 : server_demand(m, base, schedule.price_at(t)); };

  SpneProfile empty;
  empty.order = order;
  empty.periods.assign(users.size(), -1);
  for (std::size_t i : order) empty.periods[i] = 0;
  empty.amounts.assign(users.size(), 0.0);
  empty.cumulative.assign(order.size(), 0.0);
  empty.terminal_price = schedule.price_at(0);
  empty.note = "terminal-round approximation";
  if (order.empty() || demand(0) <= 0.0) return empty;

  // Last round at which the server still wants to buy from y = base.
  long lo = 0, hi = 1;
  while (hi < opt.max_round_search && demand(hi) > 0.0) hi *= 2;
  hi = std::min(hi, opt.max_round_search);
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (demand(mid) > 0.0 ? lo : hi) = mid;
  }
  const long t_end = lo;

  int evaluations = 0;
  auto privacy_only_enough = [&](long t) {
    double total = 0.0;
    for (std::size_t i : order) total += user_supply(users[i], 0.0, schedule.price_at(t));
    return total >= demand(t);
  };
  auto equilibrium_enough = [&](long t) {
    ++evaluations;
    const std::vector<double> prices(order.size(), schedule.price_at(t));
    const auto bi = backward_induction(users, order, prices, m, opt.grid_step, {base, INFINITY});
    return bi.profile.cumulative.back() >= demand(t);
  };

  long first = t_end;
  {
    long a = 0, b = t_end;
    if (privacy_only_enough(t_end)) {
      while (a < b) {
        const long mid = a + (b - a) / 2;
        if (privacy_only_enough(mid))
          b = mid;
        else
          a = mid + 1;
      }
      first = a;
    }
  }
  long T = first;
  if (equilibrium_enough(T)) {
    while (T > 0 && equilibrium_enough(T - 1)) --T;
  } else {
    while (T < t_end && !equilibrium_enough(T + 1)) ++T;
    if (T < t_end) ++T;
  }

  const double price = schedule.price_at(T);
  const std::vector<double> prices(order.size(), price);
  auto bi = backward_induction(users, order, prices, m, opt.grid_step, {base, demand(T)});
  SpneProfile prof = std::move(bi.profile);
  for (std::size_t i : order) prof.periods[i] = T;
  prof.terminal_round = T;
  prof.terminal_price = price;
  prof.iterations = evaluations;
  prof.converged = true;
  prof.note = "terminal-round approximation";
  return prof;
}

DominanceCertificate dominance_check(const UserProfile& u, long t, long tau, double amount_t, double amount_tau,
                                     const PriceSchedule& schedule, const ServerCostModel& m, double others) {
  if (!(t < tau)) fail(ErrorKind::precondition, "dominance check needs t < tau");
  if (!(amount_t >= 0.0 && amount_tau >= 0.0)) fail(ErrorKind::precondition, "amounts must be nonnegative");
  const double total = amount_t + amount_tau;
  // Privacy and accuracy depend only on the total; only revenue differs.
  const double timing_free = stage_payoff(u, total, others, 0.0, m);
  DominanceCertificate c;
  c.split_payoff = timing_free + schedule.price_at(t) * amount_t + schedule.price_at(tau) * amount_tau;
  c.concentrated_payoff = timing_free + schedule.price_at(tau) * total;
  c.strict = c.concentrated_payoff > c.split_payoff;
  return c;
}

ScheduleChoice optimize_schedule(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                 const std::vector<double>& B0_grid, const std::vector<double>& dB_grid,
                                 const CiqOptions& opt) {
  if (B0_grid.empty() || dB_grid.empty()) fail(ErrorKind::precondition, "schedule grids must be nonempty");
  std::vector<double> b0s = B0_grid, dbs = dB_grid;
  std::sort(b0s.begin(), b0s.end());
  std::sort(dbs.begin(), dbs.end());
  double base = 0.0;
  for (const auto& u : users)
    if (!u.informed) base += u.d;

  ScheduleChoice choice;
  bool found = false;
  for (double b0 : b0s) {
    for (double db : dbs) {
      ScheduleEvaluation ev;
      ev.schedule = {b0, db};
      try {
        const SpneProfile p = ciq_outcome(users, ev.schedule, m, opt);
        double paid = 0.0, bought = 0.0;
        for (std::size_t i = 0; i < users.size(); ++i) {
          paid += p.terminal_price * p.amounts[i];
          bought += p.amounts[i];
        }
        ev.objective = paid + server_cost(m, std::min(m.d_total, base + bought));
        ev.ok = true;
        if (!found || ev.objective < choice.objective) {
          choice.best = ev.schedule;
          choice.objective = ev.objective;
          found = true;
        }
      } catch (const Error& e) {
        ev.error = e.what();
      }
      choice.evaluated.push_back(ev);
    }
  }
  if (!found) fail(ErrorKind::convergence, "no schedule grid point could be evaluated");
  return choice;
}

std::vector<double> respond_to_prices(const std::vector<UserProfile>& users, const std::vector<double>& prices,
                                      const ServerCostModel& m, double tol, int max_sweeps) {
  if (prices.size() != users.size()) fail(ErrorKind::precondition, "one price per user required");
  double base = 0.0;
  std::vector<double> y(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    users[i].validate();
    if (!users[i].informed)
      base += users[i].d;
    else
      y[i] = user_supply(users[i], 0.0, std::max(0.0, prices[i]));
  }
  double total = std::accumulate(y.begin(), y.end(), 0.0);
  const ChainContext ctx{base, INFINITY};
  NoDownstream none;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (!users[i].informed) continue;
      const double others = total - y[i];
      const double next = solve_stage(users[i], others, std::max(0.0, prices[i]), m, ctx, none);
      moved = std::max(moved, std::abs(next - y[i]));
      total = others + next;
      y[i] = next;
    }
    if (moved < tol) return y;
  }
  fail(ErrorKind::convergence, "best-response fixed point did not converge");
}

}  // namespace dq
