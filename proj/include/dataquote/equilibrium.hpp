#pragma once

// Complete-information benchmark: users know each other's parameters and
// the schedule, sell in a sequential order and internalize the accuracy
// externality of everyone else's retention. Solved by backward induction
// over a grid of cumulative predecessor supply.

#include <limits>
#include <string>
#include <vector>

#include "dataquote/econ.hpp"

namespace dq {

// Users outside the chain whose data stays on the server regardless, and
// the most the server buys from the chain (residual demand cap).
struct ChainContext {
  double base = 0.0;
  double limit = std::numeric_limits<double>::infinity();
};

struct ResponseTable {
  std::size_t user = 0;
  double step = 0.0;
  std::vector<double> grid;       // cumulative predecessor supply s
  std::vector<double> response;   // optimal own amount at s
  std::vector<double> aggregate;  // own amount plus everything after, at s

  double aggregate_at(double s) const;
  double response_at(double s) const;
};

struct SpneProfile {
  std::vector<std::size_t> order;  // active users in selling order
  std::vector<long> periods;       // per user; -1 for users outside the game
  std::vector<double> amounts;     // per user
  std::vector<double> cumulative;  // prefix sums along order
  long terminal_round = 0;
  double terminal_price = 0.0;
  int iterations = 0;
  bool converged = true;
  double max_residual = 0.0;  // interpolation vs rolled-out downstream supply
  std::string note;
};

struct BackwardInductionResult {
  SpneProfile profile;
  std::vector<ResponseTable> tables;  // one per position; empty when the chain decouples
};

// dV/dy for own total y with `others` retained by everybody else.
double marginal_payoff(const UserProfile& u, double y, double others, double price, const ServerCostModel& m);
double stage_payoff(const UserProfile& u, double y, double others, double price, const ServerCostModel& m);

double best_response(const UserProfile& u, double s, double price, const ServerCostModel& m,
                     const ResponseTable* downstream = nullptr, const ChainContext& ctx = {});

// prices are per position in `order`. Tables are materialized only when
// `materialize` is set; the profile is the same either way.
BackwardInductionResult backward_induction(const std::vector<UserProfile>& users, const std::vector<std::size_t>& order,
                                           const std::vector<double>& prices, const ServerCostModel& m,
                                           double grid_step, const ChainContext& ctx = {}, bool materialize = false);

double theta_adjusted_reservation(const UserProfile& u, const ServerCostModel& m, double base);

struct CiqOptions {
  double grid_step = 10.0;
  long max_round_search = 10'000'000;
};

SpneProfile ciq_outcome(const std::vector<UserProfile>& users, const PriceSchedule& schedule,
                        const ServerCostModel& m, const CiqOptions& opt = {});

struct DominanceCertificate {
  double split_payoff;
  double concentrated_payoff;
  bool strict;
};

DominanceCertificate dominance_check(const UserProfile& u, long t, long tau, double amount_t, double amount_tau,
                                     const PriceSchedule& schedule, const ServerCostModel& m, double others = 0.0);

struct ScheduleEvaluation {
  PriceSchedule schedule;
  double objective = 0.0;
  bool ok = false;
  std::string error;
};

struct ScheduleChoice {
  PriceSchedule best;
  double objective = 0.0;
  std::vector<ScheduleEvaluation> evaluated;  // grid order, B0 outer
};

ScheduleChoice optimize_schedule(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                 const std::vector<double>& B0_grid, const std::vector<double>& dB_grid,
                                 const CiqOptions& opt = {});

// Simultaneous best responses to personalized prices with the accuracy
// externality (Gauss-Seidel). Users with informed == false stay at zero.
std::vector<double> respond_to_prices(const std::vector<UserProfile>& users, const std::vector<double>& prices,
                                      const ServerCostModel& m, double tol = 1e-6, int max_sweeps = 1000);

}  // namespace dq
