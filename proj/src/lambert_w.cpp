#include <algorithm>
#include <cmath>
#include <limits>

#include "lossfn/distribution.hpp"

namespace lossfn {

namespace {
constexpr double kMinusInvE = -0.36787944117144232160;
constexpr double kE = 2.71828182845904523536;
}  // namespace

double lambert_w_neg1(double x) {
  // Tolerate the rounding of -1/e itself.
  if (x < kMinusInvE && x >= kMinusInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    x = kMinusInvE;
  }
  if (!(x >= kMinusInvE && x < 0.0)) {
    throw DomainError("lambert_w_neg1 requires -1/e <= x < 0");
  }
  if (x == kMinusInvE) return -1.0;

  double w;
  if (x < -0.25) {
    // Branch-point series in p = -sqrt(2 (1 + e x)).
    const double p = -std::sqrt(std::max(0.0, 2.0 * (1.0 + kE * x)));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else {
    // Asymptotic expansion as x -> 0-.
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }

  // Halley iteration on w e^w - x.
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (f == 0.0 || wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = std::min(w - step, -1.0);
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

}  // namespace lossfn
