#include "lossfn/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lossfn/verify.hpp"

namespace lossfn {
namespace {

TEST(Oracle, ReferenceValues) {
  EXPECT_NEAR(numeric_loss(LossKind::FirstOrder, Distribution::exponential(2), 1.0),
              std::exp(-2.0) / 2.0, 1e-14);
  EXPECT_NEAR(numeric_loss(LossKind::SecondOrder, Distribution::poisson(1), 0.0), 0.5, 1e-14);
  EXPECT_NEAR(numeric_loss(LossKind::Complementary, Distribution::normal(0, 1), 0.0),
              0.3989422804014327, 1e-13);
  EXPECT_NEAR(numeric_loss(LossKind::LimitedExpectedValue, Distribution::exponential(1), 1.0),
              1.0 - std::exp(-1.0), 1e-13);
}

TEST(Oracle, CentralDifference) {
  EXPECT_NEAR(numeric_derivative([](double x) { return x; }, 5.0, 0.01), 1.0, 1e-12);
  EXPECT_NEAR(numeric_derivative([](double x) { return x * x; }, 3.0, 1e-4), 6.0, 1e-7);
  const auto d = Distribution::normal(0, 1);
  EXPECT_NEAR(numeric_derivative([&](double x) { return loss1(d, x); }, 0.0, 1e-5), -0.5, 1e-6);
  EXPECT_THROW(numeric_derivative([](double x) { return x; }, 0.0, 0.0), DomainError);
}

TEST(Oracle, IntegralOfFirstOrder) {
  EXPECT_NEAR(numeric_integral_of_loss1(Distribution::exponential(1), 0.0), 1.0, 1e-10);
  EXPECT_NEAR(numeric_integral_of_loss1(Distribution::normal(0, 1), 0.0), 0.25, 1e-10);
  EXPECT_NEAR(numeric_integral_of_loss1(Distribution::gamma(2, 1), 0.0), 3.0, 1e-9);
  EXPECT_THROW(numeric_integral_of_loss1(Distribution::poisson(2), 0.0), DomainError);
}

TEST(Oracle, SelfConsistency) {
  const OracleConfig cfg;
  for (Family f : kAllFamilies) {
    for (const auto& d : parameter_grid(f)) {
      const double mean = d.moments().mean;
      for (double r : level_grid(d)) {
        const double gap = numeric_loss(LossKind::FirstOrder, d, r, cfg) -
                           numeric_loss(LossKind::Complementary, d, r, cfg) + r - mean;
        EXPECT_LE(std::abs(gap), 10 * cfg.abs_tol * std::max(1.0, std::abs(mean)))
            << d.describe() << " r=" << r;
      }
    }
  }
}

TEST(Oracle, RefinementStaysWithinErrorEstimate) {
  OracleConfig coarse;
  coarse.abs_tol = 1e-8;
  coarse.rel_tol = 1e-8;
  OracleConfig fine = coarse;
  fine.abs_tol /= 2;
  fine.rel_tol /= 2;
  for (const auto& d : {Distribution::normal(10, 5), Distribution::gamma(0.5, 2),
                        Distribution::lognormal(2, 1.5), Distribution::exponential(0.1)}) {
    for (auto kind : {LossKind::FirstOrder, LossKind::SecondOrder, LossKind::Complementary}) {
      const double r = d.moments().mean;
      const auto a = numeric_loss_estimate(kind, d, r, coarse);
      const auto b = numeric_loss_estimate(kind, d, r, fine);
      EXPECT_LE(std::abs(a.value - b.value), a.error + 1e-15 * std::abs(a.value))
          << d.describe() << " " << to_string(kind);
    }
  }
}

TEST(Oracle, FarTailWithinBound) {
  OracleConfig cfg;
  for (const auto& d : {Distribution::poisson(3), Distribution::negative_binomial(2, 0.3),
                        Distribution::geometric(0.5)}) {
    double r = d.support_min();
    while (survival(d, r) >= cfg.tail_mass) r += 1.0;
    r += 5.0;
    const auto e = numeric_loss_estimate(LossKind::FirstOrder, d, r, cfg);
    EXPECT_GE(e.value, 0.0);
    EXPECT_LE(e.value, 10.0 * cfg.tail_mass) << d.describe();
  }
}

TEST(Oracle, TermBudgetExhaustion) {
  OracleConfig cfg;
  cfg.max_terms = 5;
  EXPECT_THROW(numeric_loss(LossKind::FirstOrder, Distribution::poisson(50), 0.0, cfg),
               NonConvergence);
  EXPECT_THROW(numeric_loss(LossKind::SecondOrder, Distribution::lognormal(2, 1.5), 1.0, cfg),
               NonConvergence);
}

TEST(Oracle, ConfigValidation) {
  OracleConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tail_mass = 1e-20;  // below abs_tol is allowed
  EXPECT_NO_THROW(cfg.validate());
  cfg.abs_tol = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.max_terms = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Oracle, ReportComparison) {
  const auto ok = OracleReport::compare(1.0, 1.0 + 1e-12, 1e-10, 1e-30);
  EXPECT_TRUE(ok.passed);
  EXPECT_NEAR(ok.abs_err, 1e-12, 1e-16);
  const auto rel = OracleReport::compare(1e6, 1e6 + 1e-3, 1e-10, 1e-8);
  EXPECT_TRUE(rel.passed);
  const auto bad = OracleReport::compare(2.0, 1.0, 1e-3, 1e-3);
  EXPECT_FALSE(bad.passed);
  EXPECT_DOUBLE_EQ(bad.rel_err, 1.0);
  EXPECT_EQ(OracleReport::compare(0.0, 0.0, 0.0, 0.0).rel_err, 0.0);
}

TEST(Oracle, Quantiles) {
  EXPECT_NEAR(upper_quantile(Distribution::exponential(1), 0.5), std::log(2.0), 1e-12);
  EXPECT_NEAR(lower_quantile(Distribution::normal(0, 1), 0.5), 0.0, 1e-12);
  EXPECT_NEAR(upper_quantile(Distribution::normal(0, 1), 0.025), 1.959963984540054, 1e-10);
}

TEST(Oracle, AdaptiveSimpson) {
  const auto e = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-13);
  EXPECT_NEAR(e.value, 2.0, 1e-12);
  EXPECT_LE(e.error, 1e-12);
  EXPECT_THROW(adaptive_simpson([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, 1e-15, 200),
               NonConvergence);
}

TEST(Oracle, PolicyIntegrals) {
  const auto d = Distribution::exponential(1);
  EXPECT_NEAR(numeric_stockout_frequency(d, 0.0, 1.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(numeric_expected_backorders(d, 1.0, 2.0), (std::exp(-1.0) - std::exp(-3.0)) / 2.0,
              1e-10);
}

}  // namespace
}  // namespace lossfn
