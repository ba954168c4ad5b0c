#pragma once

// Steady-state measures of a continuous-review (r, Q) policy. The demand
// argument is the lead-time demand distribution.

#include "lossfn/distribution.hpp"

namespace lossfn {

struct PolicyParams {
  double r;  // reorder point
  double q;  // order quantity
};

struct PolicyMeasures {
  double stockout_frequency;   // (L1(r) - L1(r+Q)) / Q
  double expected_backorders;  // (L2(r) - L2(r+Q)) / Q
};

// Throws DomainError for q <= 0, non-finite values, or non-integral r/q
// (q >= 1) under discrete demand.
void validate_policy(const Distribution& demand, const PolicyParams& policy);

PolicyMeasures evaluate_policy(const Distribution& demand, const PolicyParams& policy);

// Smallest reorder point whose stockout frequency does not exceed the target:
// an integer for discrete demand, bisected to 1e-8 for continuous demand.
double min_reorder_point(const Distribution& demand, double q, double max_stockout_frequency);

}  // namespace lossfn
