#include <cmath>

#include "photonbits/analysis.hpp"
#include "photonbits/error.hpp"

namespace photonbits {

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be finite and >= 0");
}

// Distribution of floor(c + u), u ~ Exp(rate x), c >= 0, at value j.
struct FloorLaw {
  double x;
  double m;  // floor(c)
  double f;  // c - m

  double pmf(double j) const {
    const double k = j - m;
    if (k < 0.0) return 0.0;
    if (k == 0.0) return -std::expm1(-x * (1.0 - f));
    return std::exp(-x * (k - f)) * -std::expm1(-x);
  }
};

}  // namespace

double a_asymptotic(double x) {
  require_nonnegative(x, "x");
  return 0.8 * x * x;
}

double eta_asymptotic(double x) {
  require_nonnegative(x, "x");
  return 0.5 - x / 4.0 + x * x / 8.0;
}

double bias_model(double x, double dt_over_tau) {
  require_nonnegative(x, "x");
  require_nonnegative(dt_over_tau, "dt/tau");
  return 0.5 * x * dt_over_tau;
}

OracleResult oracle_restartable(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("x must be finite and > 0");
  OracleResult r;
  r.x = x;
  r.q = std::exp(-x);
  r.p_tie = -std::expm1(-x) / (1.0 + r.q);
  r.p_bit = 1.0 - r.p_tie;
  r.eta_exact = 1.0 / (1.0 + std::exp(x));
  r.eta_paper = eta_asymptotic(x);
  return r;
}

RestartableExact restartable_exact(double x, double dead_over_period, double skew_over_period) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("x must be finite and > 0");
  require_nonnegative(dead_over_period, "dead time");
  require_nonnegative(skew_over_period, "skew");
  const double c1 = dead_over_period + skew_over_period;
  const double c2 = dead_over_period;
  const FloorLaw up{x, std::floor(c1), c1 - std::floor(c1)};
  const FloorLaw down{x, std::floor(c2), c2 - std::floor(c2)};

  // Tails beyond exp(-45) are below double resolution of the sums.
  const double last = std::max(up.m, down.m) + std::ceil(45.0 / x) + 2.0;
  double cdf_up = 0.0, cdf_down = 0.0;  // P(n < j)
  RestartableExact r;
  for (double j = std::min(up.m, down.m); j <= last; j += 1.0) {
    const double pu = up.pmf(j), pd = down.pmf(j);
    r.p_tie += pu * pd;
    r.p_one += pu * cdf_down;
    r.p_zero += pd * cdf_up;
    cdf_up += pu;
    cdf_down += pd;
  }
  r.eta = (1.0 - r.p_tie) / 2.0;
  r.bias = r.p_one / (r.p_one + r.p_zero) - 0.5;
  return r;
}

}  // namespace photonbits
