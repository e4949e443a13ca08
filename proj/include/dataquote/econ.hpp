#pragma once

// Closed-form economics of data redemption: server cost and demand,
// user privacy utility and supply. Everything here is a pure function.
//
// Coordinates: x is the amount redeemed (deleted), y = d_total - x the
// amount retained on the server.

#include <numbers>

namespace dq {

struct ServerCostModel {
  double a = std::numbers::e;  // exponential base, > 1
  double A1 = 0.1;             // accuracy scale
  double A2 = 3.33e-5;         // accuracy exponent rate per data unit
  double A3 = 0.0;             // accuracy offset
  double T0 = 2.85e-4;         // retraining time per retained unit
  double alpha = 1500.0;       // cost per accuracy unit
  double beta = 1.0;           // cost per time unit
  double d_total = 60000.0;    // total user endowment

  void validate() const;
  double log_base() const;  // ln a
};

struct UserProfile {
  double d = 6000.0;     // endowment
  double lambda = 10.0;  // privacy valuation
  double k = 1.0;        // privacy elasticity in [0, 1]
  double theta = 0.0;    // accuracy sensitivity
  bool informed = true;

  void validate() const;
};

struct PriceSchedule {
  double B0 = 0.001;
  double dB = 0.001;

  void validate() const;
  double price_at(long t) const { return B0 + static_cast<double>(t) * dB; }
};

enum class RetentionCase { keep_none, keep_all, interior };

struct OptimalRetention {
  double y_max;       // clamped to [0, d_total]
  double stationary;  // unclamped zero of C'(y); may be +-inf
  RetentionCase label;
};

const char* to_string(RetentionCase c);

// Server side.
double accuracy_degradation(const ServerCostModel& m, double x);
double accuracy_slope(const ServerCostModel& m, double x);      // A'(x)
double accuracy_curvature(const ServerCostModel& m, double x);  // A''(x)
double retraining_time(const ServerCostModel& m, double y);
double server_cost(const ServerCostModel& m, double y);
// Cost on the branch that still pays retraining time, also at y = d_total.
double server_cost_continuous(const ServerCostModel& m, double y);
OptimalRetention optimal_retention(const ServerCostModel& m);
double server_demand(const ServerCostModel& m, double y, double B);
double buy_all_price(const ServerCostModel& m, double y);

// User side.
double privacy_utility(const UserProfile& u, double x);
double privacy_marginal(const UserProfile& u, double x);   // P'(x)
double privacy_curvature(const UserProfile& u, double x);  // P''(x)
double reservation_price(const UserProfile& u, double sold);
double min_price_for(const UserProfile& u, double sold, double delta);
double user_supply(const UserProfile& u, double sold, double B);

}  // namespace dq
