#pragma once

// Demand distributions used by the loss-function library: parameters,
// probability functions, moments and method-of-moments fitting.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lossfn/errors.hpp"

namespace lossfn {

enum class Family {
  NegativeBinomial,
  Geometric,
  Logarithmic,
  Poisson,
  Normal,
  Gamma,
  LogNormal,
  Exponential,
};

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::NegativeBinomial, Family::Geometric, Family::Logarithmic, Family::Poisson,
    Family::Normal,           Family::Gamma,     Family::LogNormal,   Family::Exponential,
};

// Canonical snake_case name ("negative_binomial", "lognormal", ...).
std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

// Parameter names in declaration order, e.g. {"n", "p"} or {"mu", "sigma"}.
std::vector<std::string_view> parameter_names(Family family);

bool is_discrete(Family family);

// pmf C(x+n-1, x) (1-p)^n p^x on {0, 1, ...}; n may be non-integer.
struct NegativeBinomial {
  double n;
  double p;
};
// pmf (1-p)^(x-1) p on {1, 2, ...}.
struct Geometric {
  double p;
};
// pmf -p^x / (x ln(1-p)) on {1, 2, ...}.
struct Logarithmic {
  double p;
};
struct Poisson {
  double lambda;
};
struct Normal {
  double mu;
  double sigma;
};
// Shape alpha, rate beta.
struct Gamma {
  double alpha;
  double beta;
};
// Parameters of the underlying normal of ln X.
struct LogNormal {
  double mu;
  double sigma;
};
// Rate beta.
struct Exponential {
  double beta;
};

using DistributionParams = std::variant<NegativeBinomial, Geometric, Logarithmic, Poisson, Normal,
                                        Gamma, LogNormal, Exponential>;

struct Moments {
  double mean;
  double variance;

  // Throws DomainError on non-finite input or negative variance.
  static Moments make(double mean, double variance);
};

// Immutable, validated distribution value. Only the factories can create one,
// so every instance satisfies its family's parameter constraints.
class Distribution {
 public:
  static Distribution negative_binomial(double n, double p);
  static Distribution geometric(double p);
  static Distribution logarithmic(double p);
  static Distribution poisson(double lambda);
  static Distribution normal(double mu, double sigma);
  static Distribution gamma(double alpha, double beta);
  static Distribution lognormal(double mu, double sigma);
  static Distribution exponential(double beta);

  // Validates and constructs from a variant holding raw parameters.
  static Distribution from_params(const DistributionParams& params);

  // Builds from name=value pairs keyed by parameter_names(family). Unknown or
  // missing names are a DomainError.
  static Distribution from_named(Family family,
                                 const std::vector<std::pair<std::string, double>>& named);

  const DistributionParams& params() const noexcept { return params_; }
  Family family() const noexcept;
  bool discrete() const noexcept { return is_discrete(family()); }

  // Smallest point of the support; -inf for the normal distribution.
  double support_min() const noexcept;

  // Parameters paired with their names, in parameter_names() order.
  std::vector<std::pair<std::string_view, double>> named_parameters() const;

  // E[X] and Var(X) from the closed forms.
  Moments moments() const noexcept;

  std::string describe() const;

 private:
  explicit Distribution(DistributionParams params) : params_(params) {}
  DistributionParams params_;
};

// pmf for discrete families, pdf for continuous ones. Zero outside the
// support. Discrete families require an integral x (DomainError otherwise).
double density(const Distribution& dist, double x);

// P(X <= x). Discrete families use cdf(floor(x)). Exactly 0 below support.
double cdf(const Distribution& dist, double x);

// P(X > x), evaluated from complemented special functions rather than 1 - cdf.
double survival(const Distribution& dist, double x);

inline Moments moments(const Distribution& dist) { return dist.moments(); }

// Method of moments. One-parameter families match the mean only and ignore
// the variance. Throws InfeasibleMoments when the family cannot match m.
Distribution fit_from_moments(Family family, const Moments& m);

// Logarithmic fit through the W_{-1} closed form, and through bisection on
// the mean equation. Both throw InfeasibleMoments for mean <= 1.
double fit_logarithmic_closed_form(double mean);
double fit_logarithmic_bisection(double mean);

enum class DispersionRecommendation { Poisson, NegativeBinomial, Underdispersed, NotApplicable };

std::string_view to_string(DispersionRecommendation rec);

struct DispersionClass {
  double cd;
  DispersionRecommendation recommendation;
};

// Variance-to-mean ratio with the Poisson band [0.9, 1.1]. Requires mean > 0.
DispersionClass classify_dispersion(const Moments& m);

// Standard normal helpers shared by the normal and log-normal families.
double std_normal_pdf(double z) noexcept;
double std_normal_cdf(double z) noexcept;
double std_normal_sf(double z) noexcept;

// Lower branch of the Lambert W function: w <= -1 with w e^w = x, for
// x in [-1/e, 0).
double lambert_w_neg1(double x);

}  // namespace lossfn
