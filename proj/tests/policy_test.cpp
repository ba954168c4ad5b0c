#include "lossfn/policy.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lossfn/loss.hpp"
#include "lossfn/oracle.hpp"
#include "lossfn/verify.hpp"

namespace lossfn {
namespace {

TEST(Policy, ExponentialExamples) {
  const auto d = Distribution::exponential(1);
  EXPECT_NEAR(evaluate_policy(d, {0.0, 1.0}).stockout_frequency, 0.63212055882855768, 1e-15);
  // (e^-1 - e^-3) / 2
  EXPECT_NEAR(evaluate_policy(d, {1.0, 2.0}).expected_backorders, 0.15904618640178919, 1e-15);
}

TEST(Policy, FarReorderPointHasNoStockouts) {
  EXPECT_LT(evaluate_policy(Distribution::normal(100, 10), {200.0, 10.0}).stockout_frequency,
            1e-10);
}

TEST(Policy, Validation) {
  EXPECT_THROW(evaluate_policy(Distribution::poisson(3), {2.5, 1.0}), DomainError);
  EXPECT_THROW(evaluate_policy(Distribution::poisson(3), {2.0, 1.5}), DomainError);
  EXPECT_THROW(evaluate_policy(Distribution::poisson(3), {2.0, 0.0}), DomainError);
  EXPECT_THROW(evaluate_policy(Distribution::normal(0, 1), {0.0, -1.0}), DomainError);
  EXPECT_THROW(evaluate_policy(Distribution::normal(0, 1), {NAN, 1.0}), DomainError);
  EXPECT_NO_THROW(evaluate_policy(Distribution::normal(0, 1), {0.3, 0.5}));
}

TEST(Policy, MeasuresInRangeAndNonincreasing) {
  for (Family f : kAllFamilies) {
    for (const auto& d : parameter_grid(f)) {
      const double q = d.discrete() ? 3.0 : std::sqrt(d.moments().variance);
      const auto grid = level_grid(d);
      PolicyMeasures prev = evaluate_policy(d, {grid[0], q});
      for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto cur = evaluate_policy(d, {grid[i], q});
        EXPECT_GE(cur.stockout_frequency, 0.0);
        EXPECT_LE(cur.stockout_frequency, 1.0);
        EXPECT_GE(cur.expected_backorders, 0.0);
        EXPECT_LE(cur.stockout_frequency - prev.stockout_frequency, 1e-12) << d.describe();
        EXPECT_LE(cur.expected_backorders - prev.expected_backorders,
                  1e-12 * std::max(1.0, prev.expected_backorders))
            << d.describe();
        prev = cur;
      }
    }
  }
}

TEST(Policy, MatchesNumericIntegrals) {
  for (const auto& d : {Distribution::exponential(1), Distribution::exponential(0.5),
                        Distribution::gamma(2, 1), Distribution::gamma(0.5, 2),
                        Distribution::normal(100, 10), Distribution::normal(0, 1)}) {
    const Moments m = d.moments();
    const double s = std::sqrt(m.variance);
    for (auto [r, q] : {std::pair{m.mean - s, s}, {m.mean, 2 * s}, {m.mean + 2 * s, 0.5 * s}}) {
      const auto pm = evaluate_policy(d, {r, q});
      EXPECT_NEAR(pm.stockout_frequency, numeric_stockout_frequency(d, r, q), 1e-8) << d.describe();
      EXPECT_NEAR(pm.expected_backorders, numeric_expected_backorders(d, r, q), 1e-6)
          << d.describe();
    }
  }
}

TEST(ReorderPoint, ExponentialInverse) {
  EXPECT_NEAR(min_reorder_point(Distribution::exponential(1), 1.0, 0.6321205588285577), 0.0, 1e-6);
}

TEST(ReorderPoint, LooseTargetGivesLowestFeasibleLevel) {
  EXPECT_EQ(min_reorder_point(Distribution::poisson(3), 1.0, 1.0 - 1e-9), 0.0);
  // Below the support only r + Q > 1 keeps the frequency under one.
  const auto g = Distribution::geometric(0.4);
  EXPECT_EQ(min_reorder_point(g, 2.0, 1.0 - 1e-9), 0.0);
  EXPECT_NEAR(evaluate_policy(g, {0.0, 2.0}).stockout_frequency, 0.8, 1e-15);
  EXPECT_EQ(evaluate_policy(g, {-1.0, 2.0}).stockout_frequency, 1.0);
}

TEST(ReorderPoint, NormalAgreesWithGridScan) {
  const auto d = Distribution::normal(100, 10);
  const double r = min_reorder_point(d, 50.0, 0.05);
  auto freq = [&](double x) { return (loss1(d, x) - loss1(d, x + 50.0)) / 50.0; };
  double scan = 90.0;
  while (freq(scan) > 0.05) scan += 1e-4;
  EXPECT_NEAR(r, scan, 1e-4);
  EXPECT_NEAR(r, 103.44867442209667, 1e-7);
  EXPECT_LE(freq(r), 0.05);
  EXPECT_GT(freq(r - 1e-7), 0.05);
}

TEST(ReorderPoint, DiscreteIsSmallestFeasibleInteger) {
  for (Family f : {Family::NegativeBinomial, Family::Geometric, Family::Logarithmic,
                   Family::Poisson}) {
    for (const auto& d : parameter_grid(f)) {
      for (double q : {1.0, 4.0}) {
        for (double target : {0.5, 0.1, 0.01}) {
          const double r = min_reorder_point(d, q, target);
          EXPECT_EQ(r, std::round(r));
          EXPECT_LE(evaluate_policy(d, {r, q}).stockout_frequency, target) << d.describe();
          if (r > d.support_min()) {
            EXPECT_GT(evaluate_policy(d, {r - 1.0, q}).stockout_frequency, target) << d.describe();
          }
        }
      }
    }
  }
}

TEST(ReorderPoint, ContinuousIsTight) {
  for (Family f : {Family::Normal, Family::Gamma, Family::LogNormal, Family::Exponential}) {
    for (const auto& d : parameter_grid(f)) {
      const double q = std::sqrt(d.moments().variance);
      for (double target : {0.3, 0.05}) {
        const double r = min_reorder_point(d, q, target);
        EXPECT_LE(evaluate_policy(d, {r, q}).stockout_frequency, target) << d.describe();
        const double below = r - 1e-8 * std::max(1.0, std::abs(r));
        if (below > d.support_min()) {
          EXPECT_GT(evaluate_policy(d, {below - 1e-8, q}).stockout_frequency, target)
              << d.describe();
        }
      }
    }
  }
}

TEST(ReorderPoint, RejectsBadTarget) {
  EXPECT_THROW(min_reorder_point(Distribution::normal(0, 1), 1.0, 0.0), DomainError);
  EXPECT_THROW(min_reorder_point(Distribution::normal(0, 1), 1.0, 1.0), DomainError);
}

}  // namespace
}  // namespace lossfn
