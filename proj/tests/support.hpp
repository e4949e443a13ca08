#pragma once

// Shared brute-force oracles for the test binaries.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "dataquote/econ.hpp"
#include "dataquote/equilibrium.hpp"
#include "dataquote/rng.hpp"

namespace dqtest {

// Argmax over integer delta in [0, D] of B*delta + P(D - delta) - P(D).
inline double brute_supply(const dq::UserProfile& u, double sold, double B) {
  const double D = std::floor(u.d - sold);
  double best = 0.0, best_v = -std::numeric_limits<double>::infinity();
  for (double delta = 0.0; delta <= D; delta += 1.0) {
    const double v = B * delta + dq::privacy_utility(u, D - delta) - dq::privacy_utility(u, D);
    if (v > best_v) best_v = v, best = delta;
  }
  return best;
}

// Argmax over integer delta in [0, room] of C(y) - C(y + delta) - B*delta on the
// continuous cost branch.
inline double brute_demand(const dq::ServerCostModel& m, double y, double B, double room) {
  double best = 0.0, best_v = -std::numeric_limits<double>::infinity();
  const double c0 = dq::server_cost_continuous(m, y);
  for (double delta = 0.0; delta <= std::floor(room); delta += 1.0) {
    const double v = c0 - dq::server_cost_continuous(m, y + delta) - B * delta;
    if (v > best_v) best_v = v, best = delta;
  }
  return best;
}

// Exhaustive sequential optimum at integer resolution: every position
// picks the integer amount maximizing its payoff given the exact integer
// responses of everyone after it.
inline std::vector<double> exhaustive_chain(const std::vector<dq::UserProfile>& users, const std::vector<double>& prices,
                                     const dq::ServerCostModel& m) {
  const std::size_t n = users.size();
  std::map<std::pair<std::size_t, int>, std::vector<double>> memo;
  std::function<std::vector<double>(std::size_t, int)> solve = [&](std::size_t p, int s) -> std::vector<double> {
    if (p == n) return {};
    auto key = std::make_pair(p, s);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double best_v = -INFINITY;
    std::vector<double> best;
    for (int y = 0; y <= static_cast<int>(users[p].d); ++y) {
      auto rest = solve(p + 1, s + y);
      double after = 0.0;
      for (double v : rest) after += v;
      const double v = dq::stage_payoff(users[p], y, s + after, prices[p], m);
      if (v > best_v + 1e-12) {
        best_v = v;
        best = {static_cast<double>(y)};
        best.insert(best.end(), rest.begin(), rest.end());
      }
    }
    return memo[key] = best;
  };
  return solve(0, 0);
}

inline double draw(dq::Engine& rng, double lo, double hi) { return dq::uniform(rng, lo, hi); }

}  // namespace dqtest
