#pragma once

// Brute-force reference values for the loss functions, computed from the
// defining sums and integrals. Nothing here calls the closed forms in
// loss.hpp except numeric_integral_of_loss1, whose integrand is L1 itself.

#include <cstddef>
#include <functional>

#include "lossfn/distribution.hpp"
#include "lossfn/loss.hpp"

namespace lossfn {

struct OracleConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  // Probability mass allowed to be dropped from an infinite range before the
  // tail estimate takes over.
  double tail_mass = 1e-13;
  std::size_t max_terms = 10'000'000;

  // Throws DomainError unless every field is strictly positive.
  void validate() const;
};

struct OracleReport {
  double analytic;
  double oracle;
  double abs_err;
  double rel_err;
  bool passed;

  // passed iff abs_err <= abs_tol or rel_err <= rel_tol.
  static OracleReport compare(double analytic, double oracle, double abs_tol, double rel_tol);
};

// Value plus an estimate of its absolute error (quadrature error, truncated
// tail, summation rounding).
struct Estimate {
  double value;
  double error;
};

Estimate numeric_loss_estimate(LossKind kind, const Distribution& dist, double r,
                               const OracleConfig& cfg = {});

inline double numeric_loss(LossKind kind, const Distribution& dist, double r,
                           const OracleConfig& cfg = {}) {
  return numeric_loss_estimate(kind, dist, r, cfg).value;
}

// Central difference (fn(r + h) - fn(r - h)) / (2h).
template <class Fn>
double numeric_derivative(Fn&& fn, double r, double h) {
  if (!(h > 0.0)) throw DomainError("numeric_derivative requires h > 0");
  return (fn(r + h) - fn(r - h)) / (2.0 * h);
}

// Integral of loss1(dist, .) over [r, inf). Continuous families only.
double numeric_integral_of_loss1(const Distribution& dist, double r, const OracleConfig& cfg = {});

// (1/Q) * integral over [r, r+Q] of (1 - F(x)) dx.
double numeric_stockout_frequency(const Distribution& dist, double r, double q,
                                  const OracleConfig& cfg = {});

// Literal double integral
//   integral_{-inf}^{0} (1/Q) integral_{r}^{r+Q} (1 - F(u - x)) du dx.
double numeric_expected_backorders(const Distribution& dist, double r, double q,
                                   const OracleConfig& cfg = {});

// Smallest x with survival(x) <= level (continuous families), found by
// doubling search and bisection on the survival function.
double upper_quantile(const Distribution& dist, double level);
// Largest x with cdf(x) <= level (continuous families).
double lower_quantile(const Distribution& dist, double level);

// Adaptive Simpson on [a, b] with Richardson extrapolation and a recursion
// depth cap of 60. Throws NonConvergence past max_evals integrand calls.
Estimate adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                          std::size_t max_evals = 10'000'000);

}  // namespace lossfn
