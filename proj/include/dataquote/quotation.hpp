#pragma once

// Information-free ascending quotation: the server broadcasts a rising unit
// price, myopic users offer their incremental supply, the server buys up to
// its demand. A post-quotation phase probes buying everything that is left.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dataquote/econ.hpp"
#include "dataquote/rng.hpp"

namespace dq {

enum class OversupplyStrategy { major_first, minor_first, proportional, random_order };

const char* to_string(OversupplyStrategy s);
OversupplyStrategy parse_strategy(const std::string& name);  // major|minor|prop|random

struct QuotationConfig {
  PriceSchedule schedule;
  double unit = 1.0;  // trade granularity
  OversupplyStrategy oversupply = OversupplyStrategy::minor_first;
  std::uint64_t rng_seed = 42;
  long max_rounds = 10'000'000;
};

struct Trade {
  long round;
  std::size_t user;
  double quantity;
  double unit_price;
};

enum class Phase { quotation, post_quotation, terminated };

struct MarketState {
  long round = 0;
  double price = 0.0;
  std::vector<double> sold;
  double total_sold = 0.0;
  Phase phase = Phase::quotation;
  std::vector<Trade> ledger;

  double retained_base = 0.0;   // uninformed endowments, kept on the server
  double initial_demand = 0.0;  // floored demand of round 0
  long quotation_rounds = 0;    // price increments until the quotation loop stopped

  double retained() const { return retained_base + total_sold; }
  double fulfillment() const;
};

double floor_to_unit(double v, double unit);

MarketState run_quotation(const ServerCostModel& model, const std::vector<UserProfile>& users,
                          const QuotationConfig& config);

std::vector<double> allocate_oversupply(const std::vector<double>& supplies, double demand,
                                        OversupplyStrategy strategy, double unit, Engine& rng);

// Runs in place on a state whose quotation loop has stopped.
void post_quotation(MarketState& state, const ServerCostModel& model,
                    const std::vector<UserProfile>& users, const QuotationConfig& config);

void write_ledger_csv(std::ostream& out, const std::vector<Trade>& ledger);

}  // namespace dq
