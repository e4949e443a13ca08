#pragma once

// Beliefs over the price at which the quotation stops. A user who has seen
// the quote reach B^t knows the termination price is at least B^t, so the
// posterior is the prior truncated from the left.

#include <vector>

namespace dq {

enum class PriorFamily { uniform, exponential, gamma, pareto };

const char* to_string(PriorFamily f);

struct TerminationPrior {
  PriorFamily family = PriorFamily::gamma;
  // uniform: [p1, p2]; exponential: rate p1; gamma: shape p1, rate p2;
  // pareto: shape p1, scale p2. Non-pareto families are shifted by `location`.
  double p1 = 1.0;
  double p2 = 1.0;
  double location = 0.0;

  static TerminationPrior uniform(double lo, double hi);
  static TerminationPrior exponential(double rate, double location = 0.0);
  static TerminationPrior gamma(double shape, double rate, double location = 0.0);
  static TerminationPrior pareto(double shape, double scale);

  void validate() const;
  double cdf(double b) const;
  double pdf(double b) const;
  double survival(double b) const;
  double mean() const;
  double variance() const;
};

struct BeliefState {
  TerminationPrior prior;
  double current_price = 0.0;
};

double posterior_cdf(const BeliefState& s, double b);
double hazard_rate(const TerminationPrior& prior, double b);
double termination_probability(const BeliefState& s, double dB);
bool sell_condition(const BeliefState& s, double dB, double v_now, double v_next);
double update_endowment(double retained, double fresh);
TerminationPrior fit_prior(const std::vector<double>& history, PriorFamily family = PriorFamily::gamma);

}  // namespace dq
