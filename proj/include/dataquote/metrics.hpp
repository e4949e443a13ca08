#pragma once

// Welfare decomposition, fairness indices, ex-post regret and free-rider
// diagnostics.
//
// Welfare convention: the server is measured against everyone redeeming
// (saving C(0) - C(y)), users against nobody redeeming (privacy regained
// P_i(x_i) - P_i(0) minus accuracy loss theta_i (A(x) - A(0))). Payments
// move between the two and cancel in the total.

#include <vector>

#include "dataquote/benchmarks.hpp"
#include "dataquote/econ.hpp"
#include "dataquote/quotation.hpp"

namespace dq {

struct WelfareBreakdown {
  double server = 0.0;
  double users = 0.0;
  double total = 0.0;
  double transfer_free = 0.0;
};

struct FairnessIndices {
  double jain = 0.0;
  double cv = 0.0;
  double min_max_ratio = 0.0;
  bool valid = false;  // false for an all-zero vector
};

struct RunMetrics {
  WelfareBreakdown welfare;
  FairnessIndices fairness;
  std::vector<double> regret;      // empty unless a ledger was available
  std::vector<double> supply_bins;  // mean supply fraction per theta bin
  double fulfillment = 0.0;
  long rounds = 0;
};

std::vector<double> user_payoffs(const MechanismOutcome& o, const std::vector<UserProfile>& users,
                                 const ServerCostModel& m);
WelfareBreakdown welfare(const MechanismOutcome& o, const std::vector<UserProfile>& users, const ServerCostModel& m);
FairnessIndices fairness(const std::vector<double>& payoffs);

// Ex-post regret upper bound of one user from a terminated quotation.
double regret(std::size_t user, const MarketState& s, const std::vector<UserProfile>& users,
              const ServerCostModel& m, const PriceSchedule& schedule);

// Mean of per-user values within theta-rank bins (ties broken by index).
std::vector<double> freerider_bins(const std::vector<UserProfile>& users, const std::vector<double>& values,
                                   std::size_t n_bins);

std::vector<double> supply_fractions(const MechanismOutcome& o, const std::vector<UserProfile>& users);

}  // namespace dq
