#pragma once

// Closed-form loss functions of a demand distribution X at level r:
//   L1(r) = E[(X - r)^+]
//   Lc(r) = E[(r - X)^+]
//   L2(r) = 1/2 E[(X - r)^+ (X - r - 1)^+]  (discrete)
//         = 1/2 E[((X - r)^+)^2]           (continuous)
//   Le(r) = E[min(X, r)]
// Discrete families accept integral r only (DomainError otherwise).

#include <optional>
#include <string_view>

#include "lossfn/distribution.hpp"

namespace lossfn {

enum class LossKind { FirstOrder, Complementary, SecondOrder, LimitedExpectedValue };

// Short names L1, Lc, L2, Le.
std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view name);

double loss1(const Distribution& dist, double r);
double loss_c(const Distribution& dist, double r);
double loss2(const Distribution& dist, double r);
double limited_expected_value(const Distribution& dist, double r);

double evaluate_loss(LossKind kind, const Distribution& dist, double r);

}  // namespace lossfn
