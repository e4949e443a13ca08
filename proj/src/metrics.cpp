#include "dataquote/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataquote/equilibrium.hpp"
#include "dataquote/error.hpp"

namespace dq {

namespace {

void check_shape(const MechanismOutcome& o, const std::vector<UserProfile>& users, const ServerCostModel& m) {
  if (o.retained.size() != users.size() || o.payments.size() != users.size()) {
    fail(ErrorKind::precondition, "outcome and population differ in size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    total += users[i].d;
    if (o.retained[i] < 0.0 || o.retained[i] > users[i].d * (1.0 + 1e-12)) {
      fail(ErrorKind::precondition, "retained amount outside [0, d_i]");
    }
  }
  if (std::abs(total - m.d_total) > 1e-9 * std::max(1.0, m.d_total)) {
    fail(ErrorKind::precondition, "population endowment differs from model.d_total");
  }
}

double retained_total(const MechanismOutcome& o, const ServerCostModel& m) {
  return std::min(m.d_total, std::accumulate(o.retained.begin(), o.retained.end(), 0.0));
}

}  // namespace

std::vector<double> user_payoffs(const MechanismOutcome& o, const std::vector<UserProfile>& users,
                                 const ServerCostModel& m) {
  check_shape(o, users, m);
  const double x = m.d_total - retained_total(o, m);
  const double accuracy_loss = accuracy_degradation(m, x) - accuracy_degradation(m, 0.0);
  std::vector<double> w(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    const double kept = std::min(o.retained[i], users[i].d);
    w[i] = o.payments[i] + privacy_utility(users[i], users[i].d - kept) - privacy_utility(users[i], 0.0) -
           users[i].theta * accuracy_loss;
  }
  return w;
}

WelfareBreakdown welfare(const MechanismOutcome& o, const std::vector<UserProfile>& users, const ServerCostModel& m) {
  const std::vector<double> w = user_payoffs(o, users, m);
  const double y = retained_total(o, m);
  const double saving = server_cost(m, 0.0) - server_cost(m, y);
  const double paid = std::accumulate(o.payments.begin(), o.payments.end(), 0.0);

  WelfareBreakdown b;
  b.server = saving - paid;
  b.users = std::accumulate(w.begin(), w.end(), 0.0);
  b.total = b.server + b.users;

  const double x = m.d_total - y;
  const double accuracy_loss = accuracy_degradation(m, x) - accuracy_degradation(m, 0.0);
  double free = saving;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const double kept = std::min(o.retained[i], users[i].d);
    free += privacy_utility(users[i], users[i].d - kept) - privacy_utility(users[i], 0.0) -
            users[i].theta * accuracy_loss;
  }
  b.transfer_free = free;
  return b;
}

FairnessIndices fairness(const std::vector<double>& payoffs) {
  FairnessIndices f;
  if (payoffs.empty()) return f;
  const double n = static_cast<double>(payoffs.size());
  double sum = 0.0, sq = 0.0;
  for (double v : payoffs) {
    sum += v;
    sq += v * v;
  }
  if (sq == 0.0) {
    f.jain = f.cv = f.min_max_ratio = NAN;
    return f;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double v : payoffs) var += (v - mean) * (v - mean);
  var /= n;
  const auto [lo, hi] = std::minmax_element(payoffs.begin(), payoffs.end());
  f.jain = sum * sum / (n * sq);
  f.cv = mean != 0.0 ? std::sqrt(var) / mean : NAN;
  f.min_max_ratio = *hi > 0.0 ? *lo / *hi : NAN;
  f.valid = true;
  return f;
}

double regret(std::size_t user, const MarketState& s, const std::vector<UserProfile>& users,
              const ServerCostModel& m, const PriceSchedule& schedule) {
  if (user >= users.size() || s.sold.size() != users.size()) fail(ErrorKind::precondition, "unknown user");
  const UserProfile& u = users[user];
  if (!u.informed) return 0.0;

  // Best price the user could have sold at: the last round that traded,
  // or the last quote with positive demand when nothing traded.
  double top = -1.0;
  for (const auto& t : s.ledger) top = std::max(top, t.unit_price);
  if (top < 0.0) {
    if (s.quotation_rounds <= 0) return 0.0;
    top = schedule.price_at(s.quotation_rounds - 1);
  }

  const double others = s.retained() - s.sold[user];
  double revenue = 0.0;
  for (const auto& t : s.ledger)
    if (t.user == user) revenue += t.quantity * t.unit_price;
  const double realized = stage_payoff(u, s.sold[user], others, 0.0, m) + revenue;

  const double best_amount = best_response(u, 0.0, top, m, nullptr, {others, INFINITY});
  const double best = std::max(stage_payoff(u, best_amount, others, top, m), stage_payoff(u, s.sold[user], others, top, m));
  return best - realized;
}

std::vector<double> freerider_bins(const std::vector<UserProfile>& users, const std::vector<double>& values,
                                   std::size_t n_bins) {
  if (n_bins < 1) fail(ErrorKind::precondition, "need at least one bin");
  if (values.size() != users.size()) fail(ErrorKind::precondition, "one value per user required");
  if (users.size() < n_bins) fail(ErrorKind::precondition, "fewer users than bins");
  const auto [lo, hi] = std::minmax_element(users.begin(), users.end(),
                                            [](const UserProfile& a, const UserProfile& b) { return a.theta < b.theta; });
  std::vector<double> means(n_bins, 0.0);
  if (lo->theta == hi->theta) {
    // Degenerate quantiles: every equal-width bin sees the whole population.
    const double all = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    std::fill(means.begin(), means.end(), all);
    return means;
  }
  std::vector<std::size_t> rank(users.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return users[a].theta < users[b].theta; });
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t r = 0; r < rank.size(); ++r) {
    const std::size_t bin = r * n_bins / rank.size();
    means[bin] += values[rank[r]];
    ++count[bin];
  }
  for (std::size_t b = 0; b < n_bins; ++b) means[b] /= static_cast<double>(count[b]);
  return means;
}

std::vector<double> supply_fractions(const MechanismOutcome& o, const std::vector<UserProfile>& users) {
  std::vector<double> f(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i) f[i] = users[i].d > 0.0 ? o.retained[i] / users[i].d : 0.0;
  return f;
}

}  // namespace dq
