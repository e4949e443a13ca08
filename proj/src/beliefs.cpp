#include "dataquote/beliefs.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "dataquote/error.hpp"

namespace dq {

const char* to_string(PriorFamily f) {
  switch (f) {
    case PriorFamily::uniform: return "uniform";
    case PriorFamily::exponential: return "exponential";
    case PriorFamily::gamma: return "gamma";
    case PriorFamily::pareto: return "pareto";
  }
  return "?";
}

TerminationPrior TerminationPrior::uniform(double lo, double hi) { return {PriorFamily::uniform, lo, hi, 0.0}; }
TerminationPrior TerminationPrior::exponential(double rate, double location) {
  return {PriorFamily::exponential, rate, 0.0, location};
}
TerminationPrior TerminationPrior::gamma(double shape, double rate, double location) {
  return {PriorFamily::gamma, shape, rate, location};
}
TerminationPrior TerminationPrior::pareto(double shape, double scale) { return {PriorFamily::pareto, shape, scale, 0.0}; }

void TerminationPrior::validate() const {
  switch (family) {
    case PriorFamily::uniform:
      if (!(p2 > p1)) fail(ErrorKind::domain, "uniform prior needs hi > lo");
      break;
    case PriorFamily::exponential:
      if (!(p1 > 0.0)) fail(ErrorKind::domain, "exponential prior needs rate > 0");
      break;
    case PriorFamily::gamma:
    case PriorFamily::pareto:
      if (!(p1 > 0.0 && p2 > 0.0)) fail(ErrorKind::domain, "prior parameters must be positive");
      break;
  }
}

double TerminationPrior::cdf(double b) const {
  switch (family) {
    case PriorFamily::uniform:
      if (b <= p1) return 0.0;
      if (b >= p2) return 1.0;
      return (b - p1) / (p2 - p1);
    case PriorFamily::exponential: {
      const double z = b - location;
      return z <= 0.0 ? 0.0 : -std::expm1(-p1 * z);
    }
    case PriorFamily::gamma: {
      const double z = b - location;
      return z <= 0.0 ? 0.0 : boost::math::gamma_p(p1, p2 * z);
    }
    case PriorFamily::pareto:
      return b <= p2 ? 0.0 : 1.0 - std::pow(p2 / b, p1);
  }
  return 0.0;
}

double TerminationPrior::survival(double b) const {
  switch (family) {
    case PriorFamily::exponential: {
      const double z = b - location;
      return z <= 0.0 ? 1.0 : std::exp(-p1 * z);
    }
    case PriorFamily::gamma: {
      const double z = b - location;
      return z <= 0.0 ? 1.0 : boost::math::gamma_q(p1, p2 * z);
    }
    case PriorFamily::pareto:
      return b <= p2 ? 1.0 : std::pow(p2 / b, p1);
    case PriorFamily::uniform:
      return 1.0 - cdf(b);
  }
  return 0.0;
}

double TerminationPrior::pdf(double b) const {
  switch (family) {
    case PriorFamily::uniform:
      return (b >= p1 && b <= p2) ? 1.0 / (p2 - p1) : 0.0;
    case PriorFamily::exponential: {
      const double z = b - location;
      return z < 0.0 ? 0.0 : p1 * std::exp(-p1 * z);
    }
    case PriorFamily::gamma: {
      const double z = b - location;
      if (z < 0.0 || (z == 0.0 && p1 < 1.0)) return 0.0;
      return p2 * boost::math::gamma_p_derivative(p1, p2 * z);
    }
    case PriorFamily::pareto:
      return b < p2 ? 0.0 : p1 * std::pow(p2, p1) / std::pow(b, p1 + 1.0);
  }
  return 0.0;
}

double TerminationPrior::mean() const {
  switch (family) {
    case PriorFamily::uniform: return 0.5 * (p1 + p2);
    case PriorFamily::exponential: return location + 1.0 / p1;
    case PriorFamily::gamma: return location + p1 / p2;
    case PriorFamily::pareto: return p1 > 1.0 ? p1 * p2 / (p1 - 1.0) : INFINITY;
  }
  return 0.0;
}

double TerminationPrior::variance() const {
  switch (family) {
    case PriorFamily::uniform: return (p2 - p1) * (p2 - p1) / 12.0;
    case PriorFamily::exponential: return 1.0 / (p1 * p1);
    case PriorFamily::gamma: return p1 / (p2 * p2);
    case PriorFamily::pareto:
      return p1 > 2.0 ? p2 * p2 * p1 / ((p1 - 1.0) * (p1 - 1.0) * (p1 - 2.0)) : INFINITY;
  }
  return 0.0;
}

namespace {

double surviving_mass(const TerminationPrior& prior, double b) {
  prior.validate();
  const double s = prior.survival(b);
  if (!(s > 0.0)) fail(ErrorKind::domain, "belief exhausted: prior has no mass above the current price");
  return s;
}

}  // namespace

double posterior_cdf(const BeliefState& s, double b) {
  const double tail = surviving_mass(s.prior, s.current_price);
  if (b <= s.current_price) return 0.0;
  const double p = (s.prior.cdf(b) - s.prior.cdf(s.current_price)) / tail;
  return std::min(1.0, std::max(0.0, p));
}

double hazard_rate(const TerminationPrior& prior, double b) {
  const double tail = surviving_mass(prior, b);
  return prior.pdf(b) / tail;
}

double termination_probability(const BeliefState& s, double dB) {
  if (!(dB >= 0.0)) fail(ErrorKind::domain, "increment must be nonnegative");
  return posterior_cdf(s, s.current_price + dB);
}

bool sell_condition(const BeliefState& s, double dB, double v_now, double v_next) {
  const double h = hazard_rate(s.prior, s.current_price);
  return h * v_now >= v_next * (1.0 - h * dB);
}

double update_endowment(double retained, double fresh) {
  if (!(retained >= 0.0 && fresh >= 0.0)) fail(ErrorKind::domain, "endowment parts must be nonnegative");
  return retained + fresh;
}

TerminationPrior fit_prior(const std::vector<double>& history, PriorFamily family) {
  if (history.size() < 2) fail(ErrorKind::precondition, "prior fit needs at least two observations");
  double mean = 0.0;
  for (double v : history) mean += v;
  mean /= static_cast<double>(history.size());
  double var = 0.0;
  for (double v : history) var += (v - mean) * (v - mean);
  var /= static_cast<double>(history.size());
  if (!(var > 0.0)) fail(ErrorKind::domain, "degenerate prior fit: zero variance");

  switch (family) {
    case PriorFamily::gamma:
      return TerminationPrior::gamma(mean * mean / var, mean / var);
    case PriorFamily::exponential:
      return TerminationPrior::exponential(1.0 / mean);
    case PriorFamily::uniform: {
      const double half = std::sqrt(3.0 * var);
      return TerminationPrior::uniform(mean - half, mean + half);
    }
    case PriorFamily::pareto: {
      const double shape = 1.0 + std::sqrt(1.0 + mean * mean / var);
      return TerminationPrior::pareto(shape, mean * (shape - 1.0) / shape);
    }
  }
  return {};
}

}  // namespace dq
