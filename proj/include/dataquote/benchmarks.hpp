#pragma once

// Comparison mechanisms: personalized welfare-optimal pricing (OPP), its
// noisy-parameter variant, the best single posted price (BSP) and the
// boundary baselines.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dataquote/econ.hpp"
#include "dataquote/equilibrium.hpp"
#include "dataquote/quotation.hpp"
#include "dataquote/rng.hpp"

namespace dq {

struct MechanismOutcome {
  std::string mechanism;
  std::vector<double> retained;  // per user, kept on the server
  std::vector<double> payments;  // per user
  bool noisy = false;
  double sigma = 0.0;
  std::string note;
};

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

enum class BaselineKind { DNR, GDPR, FULL };

const char* to_string(BaselineKind k);

// Split of `total` across informed users equalizing marginal privacy cost.
std::vector<double> water_fill(const std::vector<UserProfile>& users, double total);

MechanismOutcome opp_solve(const std::vector<UserProfile>& users, const ServerCostModel& m);
MechanismOutcome opp_noisy(const std::vector<UserProfile>& users, const ServerCostModel& m, const NoiseSpec& noise);
MechanismOutcome bsp_solve(const std::vector<UserProfile>& users, const ServerCostModel& m,
                           const std::vector<double>& price_grid);
// Schedule prices at which the server still wants data.
std::vector<double> default_bsp_grid(const std::vector<UserProfile>& users, const ServerCostModel& m,
                                     const PriceSchedule& schedule);

MechanismOutcome baseline(BaselineKind kind, const std::vector<UserProfile>& users, const ServerCostModel& m);
MechanismOutcome baseline(BaselineKind kind, std::vector<UserProfile> users, const ServerCostModel& m, double rho,
                          Engine& rng);

// The first ceil(rho * I) users of a uniformly shuffled order are informed.
void assign_informed(std::vector<UserProfile>& users, double rho, Engine& rng);

MechanismOutcome from_market(const MarketState& s, const std::vector<UserProfile>& users);
MechanismOutcome from_profile(const SpneProfile& p, const std::vector<UserProfile>& users);

void write_outcome_csv(std::ostream& out, const std::vector<MechanismOutcome>& outcomes);

}  // namespace dq
