#include "lossfn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace lossfn {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_level(const Distribution& dist, double r) {
  if (!std::isfinite(r)) throw DomainError("loss level r must be finite");
  if (dist.discrete() && std::floor(r) != r) {
    throw DomainError("discrete distribution requires integer r");
  }
}

// At or below the support minimum every unit of demand lies above r, so the
// loss functions reduce to moments: L1 = E[X] - r, Lc = 0 and L2 is half the
// (factorial, for discrete X) second moment of X - r.
bool at_or_below_support(const Distribution& dist, double r) { return r <= dist.support_min(); }

double loss2_below_support(const Distribution& dist, double r) {
  const Moments m = dist.moments();
  const double d = m.mean - r;
  if (dist.discrete()) return 0.5 * (m.variance + d * (d - 1.0));
  return 0.5 * (m.variance + d * d);
}

struct Tails {
  double s0, s1, s2;  // survival of the base, +1 and +2 shape-shifted laws
};

// F0, F1, F2 of the negative binomial with n, n+1, n+2, at r-1, r-2, r-3.
Tails negative_binomial_tails(const NegativeBinomial& d, double r) {
  return {survival(Distribution::negative_binomial(d.n, d.p), r - 1.0),
          survival(Distribution::negative_binomial(d.n + 1.0, d.p), r - 2.0),
          survival(Distribution::negative_binomial(d.n + 2.0, d.p), r - 3.0)};
}

// F0, F1, F2 of the gamma with alpha, alpha+1, alpha+2, all at r.
Tails gamma_tails(const Gamma& d, double r) {
  return {survival(Distribution::gamma(d.alpha, d.beta), r),
          survival(Distribution::gamma(d.alpha + 1.0, d.beta), r),
          survival(Distribution::gamma(d.alpha + 2.0, d.beta), r)};
}

double logarithmic_beta(double p) { return -1.0 / std::log1p(-p); }

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::FirstOrder: return "L1";
    case LossKind::Complementary: return "Lc";
    case LossKind::SecondOrder: return "L2";
    case LossKind::LimitedExpectedValue: return "Le";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) {
  if (name == "L1" || name == "l1") return LossKind::FirstOrder;
  if (name == "Lc" || name == "LC" || name == "lc") return LossKind::Complementary;
  if (name == "L2" || name == "l2") return LossKind::SecondOrder;
  if (name == "Le" || name == "LE" || name == "le") return LossKind::LimitedExpectedValue;
  return std::nullopt;
}

double loss1(const Distribution& dist, double r) {
  check_level(dist, r);
  if (at_or_below_support(dist, r)) return dist.moments().mean - r;
  const double value = std::visit(
      Overloaded{
          [&](const NegativeBinomial& d) {
            const Tails t = negative_binomial_tails(d, r);
            const double mean = d.n * d.p / (1.0 - d.p);
            return mean * t.s1 - r * t.s0;
          },
          [&](const Geometric& d) { return std::exp(r * std::log1p(-d.p)) / d.p; },
          [&](const Logarithmic& d) {
            const double beta = logarithmic_beta(d.p);
            return beta * std::pow(d.p, r) / (1.0 - d.p) - r * survival(dist, r - 1.0);
          },
          [&](const Poisson& d) {
            return -(r - d.lambda) * survival(dist, r) + d.lambda * density(dist, r);
          },
          [&](const Normal& d) {
            const double z = (r - d.mu) / d.sigma;
            return (d.mu - r) * std_normal_sf(z) + d.sigma * std_normal_pdf(z);
          },
          [&](const Gamma& d) {
            const Tails t = gamma_tails(d, r);
            return d.alpha / d.beta * t.s1 - r * t.s0;
          },
          [&](const LogNormal& d) {
            const double log_r = std::log(r);
            const double s2 = d.sigma * d.sigma;
            const double mean = std::exp(d.mu + 0.5 * s2);
            return mean * std_normal_sf((log_r - d.mu - s2) / d.sigma) -
                   r * std_normal_sf((log_r - d.mu) / d.sigma);
          },
          [&](const Exponential& d) { return std::exp(-d.beta * r) / d.beta; },
      },
      dist.params());
  return std::max(0.0, value);
}

double loss_c(const Distribution& dist, double r) {
  check_level(dist, r);
  if (at_or_below_support(dist, r)) return 0.0;
  const double value = std::visit(
      Overloaded{
          [&](const NegativeBinomial& d) {
            const double mean = d.n * d.p / (1.0 - d.p);
            return r * cdf(dist, r - 1.0) -
                   mean * cdf(Distribution::negative_binomial(d.n + 1.0, d.p), r - 2.0);
          },
          [&](const Geometric& d) {
            return (std::expm1(r * std::log1p(-d.p)) + d.p * r) / d.p;
          },
          [&](const Logarithmic& d) {
            const double beta = logarithmic_beta(d.p);
            // beta [(1 - p^(r+1)) / (1 - p) - 1] written as beta (p - p^(r+1)) / (1 - p)
            return r * cdf(dist, r) - beta * (d.p - std::pow(d.p, r + 1.0)) / (1.0 - d.p);
          },
          [&](const Poisson& d) {
            return (r - d.lambda) * cdf(dist, r) + d.lambda * density(dist, r);
          },
          [&](const Normal& d) {
            const double z = (r - d.mu) / d.sigma;
            return (r - d.mu) * std_normal_cdf(z) + d.sigma * std_normal_pdf(z);
          },
          [&](const Gamma& d) {
            return r * cdf(dist, r) -
                   d.alpha / d.beta * cdf(Distribution::gamma(d.alpha + 1.0, d.beta), r);
          },
          [&](const LogNormal& d) {
            const double log_r = std::log(r);
            const double s2 = d.sigma * d.sigma;
            const double mean = std::exp(d.mu + 0.5 * s2);
            return r * std_normal_cdf((log_r - d.mu) / d.sigma) -
                   mean * std_normal_cdf((log_r - d.mu - s2) / d.sigma);
          },
          [&](const Exponential& d) { return r + std::expm1(-d.beta * r) / d.beta; },
      },
      dist.params());
  return std::max(0.0, value);
}

double loss2(const Distribution& dist, double r) {
  check_level(dist, r);
  if (at_or_below_support(dist, r)) return loss2_below_support(dist, r);
  const double value = std::visit(
      Overloaded{
          [&](const NegativeBinomial& d) {
            const Tails t = negative_binomial_tails(d, r);
            const double q = 1.0 - d.p;
            const double mean = d.n * d.p / q;
            const double factorial2 = d.n * (d.n + 1.0) * d.p * d.p / (q * q);
            return 0.5 * (r * r + r) * t.s0 - r * mean * t.s1 + 0.5 * factorial2 * t.s2;
          },
          [&](const Geometric& d) {
            return std::exp((r + 1.0) * std::log1p(-d.p)) / (d.p * d.p);
          },
          [&](const Logarithmic& d) {
            const double beta = logarithmic_beta(d.p);
            const double q = 1.0 - d.p;
            const double p_r = std::pow(d.p, r);
            return 0.5 * (r * r + r) * survival(dist, r - 1.0) -
                   beta * (2.0 * r + 1.0) * p_r / (2.0 * q) -
                   beta * p_r * (d.p * (r - 1.0) - r) / (2.0 * q * q);
          },
          [&](const Poisson& d) {
            const double dr = r - d.lambda;
            return 0.5 * ((dr * dr + r) * survival(dist, r) - d.lambda * dr * density(dist, r));
          },
          [&](const Normal& d) {
            const double dr = r - d.mu;
            const double z = dr / d.sigma;
            return 0.5 * (dr * dr + d.sigma * d.sigma) * std_normal_sf(z) -
                   0.5 * d.sigma * std_normal_pdf(z) * dr;
          },
          [&](const Gamma& d) {
            const Tails t = gamma_tails(d, r);
            const double mean = d.alpha / d.beta;
            const double raw2 = d.alpha * (d.alpha + 1.0) / (d.beta * d.beta);
            return 0.5 * r * r * t.s0 - r * mean * t.s1 + 0.5 * raw2 * t.s2;
          },
          [&](const LogNormal& d) {
            const double log_r = std::log(r);
            const double s2 = d.sigma * d.sigma;
            const double mean = std::exp(d.mu + 0.5 * s2);
            // E[X^2] = exp(2 mu + 2 sigma^2)
            const double raw2 = std::exp(2.0 * d.mu + 2.0 * s2);
            return 0.5 * r * r * std_normal_sf((log_r - d.mu) / d.sigma) -
                   r * mean * std_normal_sf((log_r - d.mu - s2) / d.sigma) +
                   0.5 * raw2 * std_normal_sf((log_r - d.mu - 2.0 * s2) / d.sigma);
          },
          [&](const Exponential& d) { return std::exp(-d.beta * r) / (d.beta * d.beta); },
      },
      dist.params());
  return std::max(0.0, value);
}

double limited_expected_value(const Distribution& dist, double r) {
  if (const auto* e = std::get_if<Exponential>(&dist.params()); e != nullptr && r > 0.0) {
    check_level(dist, r);
    return -std::expm1(-e->beta * r) / e->beta;
  }
  return dist.moments().mean - loss1(dist, r);
}

double evaluate_loss(LossKind kind, const Distribution& dist, double r) {
  switch (kind) {
    case LossKind::FirstOrder: return loss1(dist, r);
    case LossKind::Complementary: return loss_c(dist, r);
    case LossKind::SecondOrder: return loss2(dist, r);
    case LossKind::LimitedExpectedValue: return limited_expected_value(dist, r);
  }
  throw DomainError("unknown loss kind");
}

}  // namespace lossfn
