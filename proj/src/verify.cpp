#include "lossfn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "lossfn/loss.hpp"

namespace lossfn {
namespace {

constexpr double kLowLevel = 1e-4;

double discrete_upper_quantile(const Distribution& dist, double level) {
  // Smallest integer k with F(k) >= 1 - level.
  double lo = dist.support_min();
  if (survival(dist, lo) <= level) return lo;
  double step = 1.0;
  double hi = lo + step;
  while (survival(dist, hi) > level) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (survival(dist, mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<VerifyCase> verify_family(Family family, const VerifyOptions& options) {
  std::vector<VerifyCase> cases;
  const bool discrete = is_discrete(family);
  const double abs_tol = discrete ? 0.01 * options.tol : 0.0;
  const double rel_tol = discrete ? 0.0 : options.tol;
  for (const Distribution& dist : parameter_grid(family)) {
    const double mean = dist.moments().mean;
    for (double r : level_grid(dist)) {
      for (LossKind kind : {LossKind::FirstOrder, LossKind::Complementary, LossKind::SecondOrder}) {
        const double analytic = evaluate_loss(kind, dist, r);
        const double oracle = numeric_loss(kind, dist, r, options.oracle);
        cases.push_back({dist, std::string(to_string(kind)), r,
                         OracleReport::compare(analytic, oracle, abs_tol, rel_tol)});
      }
      const double residual = loss1(dist, r) - loss_c(dist, r) + r - mean;
      cases.push_back({dist, "identity", r,
                       OracleReport::compare(residual, 0.0,
                                             0.01 * options.tol * std::max(1.0, std::abs(mean)),
                                             0.0)});
    }
  }
  return cases;
}

}  // namespace

std::vector<Distribution> parameter_grid(Family family) {
  std::vector<Distribution> grid;
  const double probabilities[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  switch (family) {
    case Family::NegativeBinomial:
      for (double n : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        for (double p : probabilities) grid.push_back(Distribution::negative_binomial(n, p));
      }
      break;
    case Family::Geometric:
      for (double p : probabilities) grid.push_back(Distribution::geometric(p));
      break;
    case Family::Logarithmic:
      for (double p : probabilities) grid.push_back(Distribution::logarithmic(p));
      break;
    case Family::Poisson:
      for (double lambda : {0.5, 1.0, 3.0, 10.0, 50.0}) grid.push_back(Distribution::poisson(lambda));
      break;
    case Family::Normal:
      for (auto [mu, sigma] : {std::pair{0.0, 1.0}, {100.0, 10.0}, {-5.0, 0.5}, {10.0, 5.0},
                               {1000.0, 300.0}}) {
        grid.push_back(Distribution::normal(mu, sigma));
      }
      break;
    case Family::Gamma:
      for (double alpha : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        for (double beta : {0.5, 2.0}) grid.push_back(Distribution::gamma(alpha, beta));
      }
      break;
    case Family::LogNormal:
      for (auto [mu, sigma] : {std::pair{0.0, 0.25}, {0.0, 1.0}, {1.0, 0.5}, {2.0, 1.5},
                               {-1.0, 2.0}}) {
        grid.push_back(Distribution::lognormal(mu, sigma));
      }
      break;
    case Family::Exponential:
      for (double beta : {0.1, 0.5, 1.0, 2.0, 10.0}) grid.push_back(Distribution::exponential(beta));
      break;
  }
  return grid;
}

std::vector<double> level_grid(const Distribution& dist, std::size_t min_points) {
  min_points = std::max<std::size_t>(min_points, 2);
  std::vector<double> grid;
  if (dist.discrete()) {
    const double lo = dist.support_min();
    double hi = discrete_upper_quantile(dist, kLowLevel);
    hi = std::max(hi, lo + static_cast<double>(min_points - 1));
    const double span = hi - lo;
    const std::size_t target = std::max<std::size_t>(min_points, 40);
    if (span + 1.0 <= static_cast<double>(target)) {
      for (double x = lo; x <= hi; x += 1.0) grid.push_back(x);
    } else {
      for (std::size_t i = 0; i < target; ++i) {
        grid.push_back(lo + std::round(span * static_cast<double>(i) / (target - 1)));
      }
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    return grid;
  }
  const double smin = dist.support_min();
  const double lo = std::isfinite(smin) ? smin : lower_quantile(dist, kLowLevel);
  const double hi = upper_quantile(dist, kLowLevel);
  const std::size_t n = std::max<std::size_t>(min_points, 24);
  for (std::size_t i = 0; i < n; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return grid;
}

VerifyResult run_verification(const VerifyOptions& options) {
  options.oracle.validate();
  if (!(options.tol > 0.0)) throw DomainError("verification tolerance must be positive");
  std::vector<Family> families;
  if (options.family) {
    families.push_back(*options.family);
  } else {
    families.assign(kAllFamilies.begin(), kAllFamilies.end());
  }

  std::vector<std::vector<VerifyCase>> per_family(families.size());
  if (options.threads > 1) {
    std::vector<std::future<std::vector<VerifyCase>>> jobs;
    for (Family f : families) {
      jobs.push_back(std::async(std::launch::async, verify_family, f, std::cref(options)));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) per_family[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < families.size(); ++i) {
      per_family[i] = verify_family(families[i], options);
    }
  }

  VerifyResult result;
  for (auto& cases : per_family) {
    for (auto& c : cases) {
      if (!c.report.passed) ++result.failed;
      result.cases.push_back(std::move(c));
    }
  }
  return result;
}

}  // namespace lossfn
