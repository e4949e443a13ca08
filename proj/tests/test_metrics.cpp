#include <cmath>

#include "dataquote/error.hpp"
#include "dataquote/metrics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dq;

namespace {

std::vector<UserProfile> table_population(std::uint64_t replicate, bool accuracy_aware) {
  auto rng = make_stream(29, replicate, "population");
  std::vector<UserProfile> users(10);
  for (auto& u : users) {
    u.lambda = uniform(rng, 0.5, 30.0);
    u.theta = accuracy_aware ? uniform(rng, 0.0, 5.0) : 0.0;
  }
  return users;
}

}  // namespace

TEST_CASE("welfare of a single sale") {
  const std::vector<UserProfile> users{UserProfile{6000, 10, 1, 0, true}};
  ServerCostModel m;
  m.d_total = 6000;
  MechanismOutcome o;
  o.retained = {1500};
  o.payments = {1500 * 0.004};
  const auto w = welfare(o, users, m);
  const double expected = server_cost(m, 0.0) - server_cost(m, 1500.0) + 10.0 * std::log(4501.0);
  CHECK(w.total == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w.transfer_free == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w.server == doctest::Approx(server_cost(m, 0.0) - server_cost(m, 1500.0) - 6.0).epsilon(1e-12));
}

TEST_CASE("nothing sold: the server bears the full redemption cost") {
  // Users keep their data away (all redeem); the server saves nothing and
  // users regain all privacy.
  const auto users = table_population(0, true);
  MechanismOutcome o;
  o.retained.assign(10, 0.0);
  o.payments.assign(10, 0.0);
  ServerCostModel m;
  const auto w = welfare(o, users, m);
  CHECK(w.server == 0.0);
  double privacy = 0.0, theta = 0.0;
  for (const auto& u : users) privacy += privacy_utility(u, u.d), theta += u.theta;
  CHECK(w.users == doctest::Approx(privacy - theta * (accuracy_degradation(m, 60000) - accuracy_degradation(m, 0))));
}

TEST_CASE("welfare input checks") {
  const auto users = table_population(0, false);
  MechanismOutcome o;
  o.retained.assign(9, 0.0);
  o.payments.assign(9, 0.0);
  CHECK_THROWS_AS(welfare(o, users, ServerCostModel{}), Error);
  o.retained.assign(10, 7000.0);
  o.payments.assign(10, 0.0);
  CHECK_THROWS_AS(welfare(o, users, ServerCostModel{}), Error);
}

TEST_CASE("fairness indices") {
  auto f = fairness({3, 3, 3});
  CHECK(f.jain == doctest::Approx(1.0));
  CHECK(f.cv == doctest::Approx(0.0));
  CHECK(f.min_max_ratio == doctest::Approx(1.0));
  std::vector<double> one(10, 0.0);
  one[4] = 2.5;
  CHECK(fairness(one).jain == doctest::Approx(0.1));
  CHECK(fairness({2, 1, 1}).jain == doctest::Approx(16.0 / 18.0).epsilon(1e-15));
  f = fairness({0, 0, 0});
  CHECK_FALSE(f.valid);
  CHECK(std::isnan(f.jain));
}

TEST_CASE("property: Jain index bounds") {
  auto rng = make_stream(29, 0, "jain");
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + uniform_index(rng, 20);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, 0, 100);
    const double j = fairness(v).jain;
    CHECK(j >= 1.0 / static_cast<double>(n) - 1e-12);
    CHECK(j <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: transfers cancel in total welfare") {
  auto rng = make_stream(29, 0, "transfers");
  ServerCostModel m;
  for (int i = 0; i < 500; ++i) {
    const auto users = table_population(static_cast<std::uint64_t>(i), true);
    MechanismOutcome o;
    for (const auto& u : users) {
      o.retained.push_back(uniform(rng, 0, u.d));
      o.payments.push_back(uniform(rng, 0, 200));
    }
    const auto w = welfare(o, users, m);
    CHECK(w.total == doctest::Approx(w.transfer_free).epsilon(1e-9));
    CHECK(w.total == w.server + w.users);
  }
}

TEST_CASE("regret: an abstaining user priced out has none") {
  auto users = table_population(1, false);
  users[0].lambda = 1e6;
  const QuotationConfig cfg;
  const auto s = run_quotation(ServerCostModel{}, users, cfg);
  CHECK(s.sold[0] == 0.0);
  CHECK(regret(0, s, users, ServerCostModel{}, cfg.schedule) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("regret: concentrated sale at the top price has none") {
  // The whole closed-form supply sold in one trade at the top price.
  ServerCostModel m;
  m.d_total = 6000;
  const std::vector<UserProfile> users{UserProfile{6000, 60, 1, 0, true}};
  const QuotationConfig cfg;
  MarketState direct;
  direct.sold = {user_supply(users[0], 0.0, 0.02)};
  direct.total_sold = direct.sold[0];
  direct.ledger = {{19, 0, direct.sold[0], 0.02}};
  direct.quotation_rounds = 20;
  CHECK(regret(0, direct, users, m, cfg.schedule) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("regret: early greedy sales against a brute-force single sale") {
  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto users = table_population(r, r % 2 == 1);
    const QuotationConfig cfg;
    ServerCostModel m;
    const auto s = run_quotation(m, users, cfg);
    for (std::size_t i = 0; i < users.size(); ++i) {
      double top = 0.0, revenue = 0.0;
      for (const auto& t : s.ledger) {
        top = std::max(top, t.unit_price);
        if (t.user == i) revenue += t.quantity * t.unit_price;
      }
      const double others = s.retained() - s.sold[i];
      double best = -INFINITY;
      for (double a = 0; a <= users[i].d; a += 1.0) best = std::max(best, stage_payoff(users[i], a, others, top, m));
      const double realized = stage_payoff(users[i], s.sold[i], others, 0.0, m) + revenue;
      const double R = regret(i, s, users, m, cfg.schedule);
      CHECK(R == doctest::Approx(best - realized).epsilon(1e-6).scale(1.0));
      CHECK(R >= -1e-9);
    }
  }
}

TEST_CASE("regret: a greedy seller loses the price gap") {
  // theta = 0, trades at rising prices; the loss is the gap to the top price
  // on every unit plus the gain from re-optimizing the amount at that price.
  ServerCostModel m;
  m.d_total = 6000;
  const std::vector<UserProfile> users{UserProfile{6000, 10, 1, 0, true}};
  MarketState s;
  s.sold = {3000};
  s.total_sold = 3000;
  s.ledger = {{0, 0, 1000, 0.002}, {1, 0, 2000, 0.003}};
  s.quotation_rounds = 2;
  const double gap = (0.003 - 0.002) * 1000;
  const double best_amount = user_supply(users[0], 0.0, 0.003);
  const double adjust = stage_payoff(users[0], best_amount, 0, 0.003, m) - stage_payoff(users[0], 3000, 0, 0.003, m);
  CHECK(regret(0, s, users, m, {0.001, 0.001}) == doctest::Approx(gap + adjust).epsilon(1e-9));
}

TEST_CASE("free-rider bins") {
  std::vector<UserProfile> users(6);
  for (std::size_t i = 0; i < 6; ++i) users[i].theta = static_cast<double>(5 - i);
  const std::vector<double> v{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto bins = freerider_bins(users, v, 3);
  CHECK(bins[0] == doctest::Approx(0.55));  // theta 0, 1
  CHECK(bins[1] == doctest::Approx(0.35));
  CHECK(bins[2] == doctest::Approx(0.15));

  std::vector<UserProfile> flat(6);
  const auto same = freerider_bins(flat, v, 3);
  CHECK(same[0] == doctest::Approx(0.35));
  CHECK(same[1] == same[0]);
  CHECK(same[2] == same[0]);

  const auto single = freerider_bins({UserProfile{}}, {0.42}, 1);
  CHECK(single == std::vector<double>{0.42});
  CHECK_THROWS_AS(freerider_bins(users, v, 7), Error);
  CHECK_THROWS_AS(freerider_bins(users, v, 0), Error);
}

TEST_CASE("property: regret is nonnegative in quotation runs") {
  ServerCostModel over;
  over.alpha = 10000;
  over.T0 = 0.05;
  for (std::uint64_t r = 0; r < 30; ++r) {
    for (const auto& m : {ServerCostModel{}, over}) {
      auto users = table_population(r, true);
      if (r % 4 == 0) users[3].informed = false;
      QuotationConfig cfg;
      cfg.oversupply = static_cast<OversupplyStrategy>(r % 4);
      const auto s = run_quotation(m, users, cfg);
      for (std::size_t i = 0; i < users.size(); ++i) CHECK(regret(i, s, users, m, cfg.schedule) >= -1e-7);
    }
  }
}

TEST_CASE("property: the oversupply strategy only moves user welfare") {
  for (std::uint64_t r = 0; r < 40; ++r) {
    const auto users = table_population(r, false);
    ServerCostModel m;
    double server = 0.0;
    for (int k = 0; k < 4; ++k) {
      QuotationConfig cfg;
      cfg.oversupply = static_cast<OversupplyStrategy>(k);
      const auto w = welfare(from_market(run_quotation(m, users, cfg), users), users, m);
      if (k == 0)
        server = w.server;
      else
        CHECK(std::abs(w.server - server) <= 0.002 * std::abs(server));
    }
  }
}
