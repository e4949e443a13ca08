#include <cmath>

#include "dataquote/beliefs.hpp"
#include "dataquote/error.hpp"
#include "dataquote/rng.hpp"
#include "doctest.h"

using namespace dq;

TEST_CASE("posterior is the left-truncated prior") {
  const BeliefState s{TerminationPrior::uniform(0.0, 0.1), 0.04};
  CHECK(posterior_cdf(s, 0.07) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(posterior_cdf(s, 0.04 + 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(posterior_cdf(s, 0.04) == 0.0);
  CHECK(posterior_cdf(s, 1e6) == 1.0);
  const BeliefState exhausted{TerminationPrior::uniform(0.0, 0.1), 0.1};
  CHECK_THROWS_AS(posterior_cdf(exhausted, 0.2), Error);
}

TEST_CASE("hazard rates") {
  CHECK(hazard_rate(TerminationPrior::exponential(20.0), 0.3) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(hazard_rate(TerminationPrior::uniform(0.0, 0.1), 0.05) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(hazard_rate(TerminationPrior::pareto(3.0, 0.01), 0.05) == doctest::Approx(3.0 / 0.05).epsilon(1e-12));
  CHECK_THROWS_AS(hazard_rate(TerminationPrior::uniform(0.0, 0.1), 0.1), Error);
}

TEST_CASE("termination probability") {
  const BeliefState s{TerminationPrior::uniform(0.0, 0.1), 0.04};
  CHECK(termination_probability(s, 0.01) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(termination_probability(s, 0.0) == 0.0);
  CHECK(termination_probability(s, 0.5) == 1.0);
}

TEST_CASE("sell condition") {
  const BeliefState expo{TerminationPrior::exponential(20.0), 0.01};
  CHECK(sell_condition(expo, 0.001, 10.0, 0.21));
  CHECK(sell_condition(expo, 0.001, 0.0, 0.0));
  CHECK(sell_condition(expo, 0.001, 1e-9, 0.0));
  CHECK_FALSE(sell_condition(expo, 0.001, 0.01, 0.21));
  // A prior whose mass sits far above the quote has (numerically) zero hazard.
  const BeliefState far{TerminationPrior::uniform(50.0, 60.0), 0.01};
  CHECK(hazard_rate(far.prior, 0.01) == 0.0);
  CHECK_FALSE(sell_condition(far, 0.001, 10.0, 0.21));
  CHECK(sell_condition(far, 0.001, 10.0, 0.0));
}

TEST_CASE("endowment dynamics") {
  CHECK(update_endowment(4000.0, 500.0) == 4500.0);
  CHECK(update_endowment(0.0, 0.0) == 0.0);
  CHECK(update_endowment(6000.0, 0.0) == 6000.0);
  CHECK_THROWS_AS(update_endowment(-1.0, 2.0), Error);
}

TEST_CASE("moment fits") {
  const auto g = fit_prior({1.0, 3.0});
  CHECK(g.family == PriorFamily::gamma);
  CHECK(g.p1 == doctest::Approx(4.0));
  CHECK(g.p2 == doctest::Approx(2.0));
  CHECK(g.mean() == doctest::Approx(2.0));
  CHECK(g.variance() == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_prior({2.0, 2.0, 2.0}), Error);
  CHECK_THROWS_AS(fit_prior({2.0}), Error);

  // Gamma(4, rate 2) sample through the sum of four exponentials.
  auto rng = make_stream(21, 0, "gamma");
  std::vector<double> sample(100000);
  for (auto& v : sample) {
    v = 0.0;
    for (int j = 0; j < 4; ++j) v += -std::log1p(-uniform01(rng)) / 2.0;
  }
  const auto fitted = fit_prior(sample);
  CHECK(std::abs(fitted.p1 / 4.0 - 1.0) < 0.05);
  CHECK(std::abs(fitted.p2 / 2.0 - 1.0) < 0.05);

  const auto u = fit_prior({0.0, 1.0, 2.0}, PriorFamily::uniform);
  CHECK(u.mean() == doctest::Approx(1.0));
  CHECK(u.variance() == doctest::Approx(2.0 / 3.0));
  const auto e = fit_prior({1.0, 3.0}, PriorFamily::exponential);
  CHECK(e.mean() == doctest::Approx(2.0));
}

TEST_CASE("property: priors are proper distributions") {
  const TerminationPrior priors[] = {TerminationPrior::uniform(0.0, 0.1), TerminationPrior::exponential(20.0, 0.001),
                                     TerminationPrior::gamma(4.0, 80.0), TerminationPrior::pareto(2.5, 0.002)};
  for (const auto& p : priors) {
    double last = 0.0;
    for (double b = 0.0; b < 0.5; b += 0.0005) {
      CHECK(p.cdf(b) >= last);
      CHECK(p.pdf(b) >= 0.0);
      last = p.cdf(b);
    }
    CHECK(p.cdf(1e9) == doctest::Approx(1.0));
  }
}

TEST_CASE("property: hazard approximation error is second order") {
  for (const auto& prior : {TerminationPrior::exponential(20.0), TerminationPrior::gamma(2.0, 10.0)}) {
    const BeliefState s{prior, 0.02};
    const double h = hazard_rate(prior, s.current_price);
    double previous = 0.0;
    for (double dB : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double err = std::abs(termination_probability(s, dB) - h * dB);
      CHECK(err <= 1e3 * dB * dB);
      if (previous > 0.0) CHECK(previous / err == doctest::Approx(100.0).epsilon(0.15));
      previous = err;
    }
  }
  // The uniform family has a constant density, so the hazard form is exact.
  const BeliefState flat{TerminationPrior::uniform(0.0, 0.1), 0.03};
  for (double dB : {1e-2, 1e-3, 1e-4, 1e-5})
    CHECK(std::abs(termination_probability(flat, dB) - hazard_rate(flat.prior, 0.03) * dB) <= 1e-12);
}

TEST_CASE("property: hazard monotonicity by family") {
  const auto pareto = TerminationPrior::pareto(2.0, 0.001);
  const auto expo = TerminationPrior::exponential(15.0);
  for (double b = 0.001; b < 1.0; b += 0.001) {
    CHECK(hazard_rate(pareto, b + 0.001) < hazard_rate(pareto, b));
    CHECK(hazard_rate(expo, b + 0.001) == doctest::Approx(hazard_rate(expo, b)).epsilon(1e-9));
  }
}

TEST_CASE("property: truncation composes") {
  const auto prior = TerminationPrior::gamma(3.0, 50.0);
  auto rng = make_stream(21, 0, "truncate");
  for (int i = 0; i < 500; ++i) {
    const double bt = uniform(rng, 0.0, 0.05), btau = bt + uniform(rng, 0.0, 0.05);
    const double b = btau + uniform(rng, 0.0, 0.1);
    const BeliefState first{prior, bt};
    // Truncating the posterior at btau.
    const double twice = (posterior_cdf(first, b) - posterior_cdf(first, btau)) / (1.0 - posterior_cdf(first, btau));
    CHECK(twice == doctest::Approx(posterior_cdf(BeliefState{prior, btau}, b)).epsilon(1e-9));
  }
}

TEST_CASE("property: endowment update is exact on unit multiples") {
  auto rng = make_stream(21, 0, "endowment");
  for (int i = 0; i < 1000; ++i) {
    const double y = static_cast<double>(uniform_index(rng, 100000));
    const double g = static_cast<double>(uniform_index(rng, 100000));
    CHECK(update_endowment(y, g) == y + g);
  }
}
