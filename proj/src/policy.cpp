#include "lossfn/policy.hpp"

#include <algorithm>
#include <cmath>

#include "lossfn/loss.hpp"

namespace lossfn {

void validate_policy(const Distribution& demand, const PolicyParams& policy) {
  if (!std::isfinite(policy.r)) throw DomainError("reorder point r must be finite");
  if (!std::isfinite(policy.q) || !(policy.q > 0.0)) {
    throw DomainError("order quantity q must be positive");
  }
  if (demand.discrete()) {
    if (std::floor(policy.r) != policy.r) {
      throw DomainError("discrete distribution requires integer r");
    }
    if (std::floor(policy.q) != policy.q || policy.q < 1.0) {
      throw DomainError("discrete distribution requires integer q >= 1");
    }
  }
}

PolicyMeasures evaluate_policy(const Distribution& demand, const PolicyParams& policy) {
  validate_policy(demand, policy);
  const double r = policy.r;
  const double q = policy.q;
  const double frequency = (loss1(demand, r) - loss1(demand, r + q)) / q;
  const double backorders = (loss2(demand, r) - loss2(demand, r + q)) / q;
  return {std::clamp(frequency, 0.0, 1.0), std::max(backorders, 0.0)};
}

namespace {

double frequency_at(const Distribution& demand, double r, double q) {
  return evaluate_policy(demand, {r, q}).stockout_frequency;
}

}  // namespace

double min_reorder_point(const Distribution& demand, double q, double max_stockout_frequency) {
  if (!(max_stockout_frequency > 0.0 && max_stockout_frequency < 1.0)) {
    throw DomainError("target stockout frequency must lie in (0, 1)");
  }
  validate_policy(demand, {0.0, q});
  const double target = max_stockout_frequency;
  const Moments m = demand.moments();
  double scale = std::max({std::sqrt(m.variance), q, 1.0});
  if (demand.discrete()) scale = std::ceil(scale);

  // Bracket: frequency(lo) > target >= frequency(hi). Below support minimum
  // minus Q the frequency is exactly 1.
  double hi = std::isfinite(demand.support_min()) ? demand.support_min() : m.mean;
  double step = scale;
  while (frequency_at(demand, hi, q) > target) {
    hi += step;
    step *= 2.0;
  }
  double lo = hi - scale;
  step = scale;
  while (frequency_at(demand, lo, q) <= target) {
    hi = lo;
    step *= 2.0;
    lo -= step;
  }

  if (demand.discrete()) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    while (hi - lo > 1.0) {
      const double mid = std::floor(0.5 * (lo + hi));
      if (frequency_at(demand, mid, q) > target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (frequency_at(demand, mid, q) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace lossfn
