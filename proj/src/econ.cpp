#include "dataquote/econ.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dataquote/error.hpp"

namespace dq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    fail(ErrorKind::domain, std::string(what) + " = " + std::to_string(v) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

// a^(A2 x) through exp; overflow past ~709 saturates to inf, callers that
// need finite answers work with the logarithm instead.
double growth(const ServerCostModel& m, double x) { return std::exp(m.A2 * m.log_base() * x); }

}  // namespace

void ServerCostModel::validate() const {
  if (!(a > 1.0)) fail(ErrorKind::domain, "model.a must exceed 1");
  if (!(A1 > 0.0)) fail(ErrorKind::domain, "model.A1 must be positive");
  if (!(A2 > 0.0)) fail(ErrorKind::domain, "model.A2 must be positive");
  if (!(A3 >= 0.0)) fail(ErrorKind::domain, "model.A3 must be nonnegative");
  if (!(T0 >= 0.0)) fail(ErrorKind::domain, "model.T0 must be nonnegative");
  if (!(alpha >= 0.0)) fail(ErrorKind::domain, "model.alpha must be nonnegative");
  if (!(beta >= 0.0)) fail(ErrorKind::domain, "model.beta must be nonnegative");
  if (!(d_total > 0.0)) fail(ErrorKind::domain, "model.d_total must be positive");
}

double ServerCostModel::log_base() const { return std::log(a); }

void UserProfile::validate() const {
  if (!(d >= 0.0)) fail(ErrorKind::domain, "user endowment must be nonnegative");
  if (!(lambda >= 0.0)) fail(ErrorKind::domain, "user lambda must be nonnegative");
  if (!(k >= 0.0 && k <= 1.0)) fail(ErrorKind::domain, "user k must lie in [0, 1]");
  if (!(theta >= 0.0)) fail(ErrorKind::domain, "user theta must be nonnegative");
}

void PriceSchedule::validate() const {
  if (!(B0 >= 0.0)) fail(ErrorKind::domain, "B0 must be nonnegative");
  if (!(dB > 0.0)) fail(ErrorKind::domain, "dB must be positive");
}

const char* to_string(RetentionCase c) {
  switch (c) {
    case RetentionCase::keep_none: return "keep-none";
    case RetentionCase::keep_all: return "keep-all";
    case RetentionCase::interior: return "interior";
  }
  return "?";
}

double accuracy_degradation(const ServerCostModel& m, double x) {
  require_range(x, 0.0, m.d_total, "redeemed amount");
  return m.A1 * growth(m, x) - m.A3;
}

double accuracy_slope(const ServerCostModel& m, double x) {
  require_range(x, 0.0, m.d_total, "redeemed amount");
  return m.A1 * m.A2 * m.log_base() * growth(m, x);
}

double accuracy_curvature(const ServerCostModel& m, double x) {
  require_range(x, 0.0, m.d_total, "redeemed amount");
  const double la = m.log_base();
  return m.A1 * m.A2 * m.A2 * la * la * growth(m, x);
}

double retraining_time(const ServerCostModel& m, double y) {
  require_range(y, 0.0, m.d_total, "retained amount");
  return y == m.d_total ? 0.0 : m.T0 * y;
}

double server_cost_continuous(const ServerCostModel& m, double y) {
  require_range(y, 0.0, m.d_total, "retained amount");
  return m.alpha * (m.A1 * growth(m, m.d_total - y) - m.A3) + m.beta * m.T0 * y;
}

double server_cost(const ServerCostModel& m, double y) {
  require_range(y, 0.0, m.d_total, "retained amount");
  return m.alpha * (m.A1 * growth(m, m.d_total - y) - m.A3) + m.beta * retraining_time(m, y);
}

OptimalRetention optimal_retention(const ServerCostModel& m) {
  const double la = m.log_base();
  const double time_rate = m.beta * m.T0;
  if (time_rate <= 0.0) return {m.d_total, kInf, RetentionCase::keep_all};
  const double scale = m.alpha * m.A1 * m.A2 * la;
  if (scale <= 0.0) return {0.0, -kInf, RetentionCase::keep_none};
  const double stationary = m.d_total + (std::log(scale) - std::log(time_rate)) / (m.A2 * la);
  if (stationary >= m.d_total) return {m.d_total, stationary, RetentionCase::keep_all};
  if (stationary <= 0.0) return {0.0, stationary, RetentionCase::keep_none};
  return {stationary, stationary, RetentionCase::interior};
}

double server_demand(const ServerCostModel& m, double y, double B) {
  const OptimalRetention opt = optimal_retention(m);
  if (!(y >= 0.0) || y > opt.y_max) fail(ErrorKind::domain, "retained amount above y_max");
  if (!(B >= 0.0)) fail(ErrorKind::domain, "price must be nonnegative");
  const double room = opt.y_max - y;
  if (room <= 0.0) return 0.0;
  const double la = m.log_base();
  const double scale = m.alpha * m.A1 * m.A2 * la;
  const double marginal_floor = m.beta * m.T0 + B;
  if (scale <= 0.0) return 0.0;
  if (marginal_floor <= 0.0) return room;
  // Log space: ln(scale) + A2 ln a (d - y) - ln(beta T0 + B).
  const double log_num = std::log(scale) + m.A2 * la * (m.d_total - y);
  const double delta = (log_num - std::log(marginal_floor)) / (m.A2 * la);
  return std::clamp(delta, 0.0, room);
}

double buy_all_price(const ServerCostModel& m, double y) {
  const OptimalRetention opt = optimal_retention(m);
  if (!(y >= 0.0 && y < opt.y_max)) fail(ErrorKind::domain, "buy-all price needs 0 <= y < y_max");
  return (server_cost_continuous(m, opt.y_max) - server_cost_continuous(m, y)) / (opt.y_max - y);
}

double privacy_utility(const UserProfile& u, double x) {
  require_range(x, 0.0, u.d, "redeemed amount");
  if (u.k == 1.0) return u.lambda * std::log1p(x);
  return u.lambda * std::pow(x + 1.0, 1.0 - u.k) / (1.0 - u.k);
}

double privacy_marginal(const UserProfile& u, double x) {
  require_range(x, 0.0, u.d, "redeemed amount");
  if (u.k == 0.0) return u.lambda;
  if (u.k == 1.0) return u.lambda / (x + 1.0);
  return u.lambda * std::pow(x + 1.0, -u.k);
}

double privacy_curvature(const UserProfile& u, double x) {
  require_range(x, 0.0, u.d, "redeemed amount");
  if (u.k == 0.0) return 0.0;
  return -u.k * u.lambda * std::pow(x + 1.0, -u.k - 1.0);
}

double reservation_price(const UserProfile& u, double sold) {
  if (!(sold >= 0.0 && sold < u.d)) fail(ErrorKind::domain, "reservation price needs 0 <= sold < d_i");
  return privacy_marginal(u, u.d - sold);
}

double min_price_for(const UserProfile& u, double sold, double delta) {
  if (!(sold >= 0.0 && sold < u.d)) fail(ErrorKind::domain, "min price needs 0 <= sold < d_i");
  const double remaining = u.d - sold;
  if (!(delta > 0.0 && delta <= remaining)) fail(ErrorKind::domain, "min price needs 0 < delta <= remaining");
  const double base = remaining + 1.0;
  if (u.k == 0.0) return u.lambda;
  // P(D) - P(D - delta) written to avoid cancellation for small delta.
  const double shrink = std::log1p(-delta / base);
  double loss;
  if (u.k == 1.0) {
    loss = -u.lambda * shrink;
  } else {
    const double e = 1.0 - u.k;
    loss = -u.lambda / e * std::pow(base, e) * std::expm1(e * shrink);
  }
  return loss / delta;
}

double user_supply(const UserProfile& u, double sold, double B) {
  if (!(sold >= 0.0 && sold <= u.d)) fail(ErrorKind::domain, "supply needs 0 <= sold <= d_i");
  if (!(B >= 0.0)) fail(ErrorKind::domain, "price must be nonnegative");
  const double remaining = u.d - sold;
  if (remaining <= 0.0 || B <= 0.0) return 0.0;
  if (u.lambda == 0.0) return remaining;
  if (u.k == 0.0) return B > u.lambda ? remaining : 0.0;
  const double keep_plus_one = u.k == 1.0 ? u.lambda / B : std::pow(u.lambda / B, 1.0 / u.k);
  return std::clamp(remaining + 1.0 - keep_plus_one, 0.0, remaining);
}

}  // namespace dq
