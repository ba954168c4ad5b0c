#include "lossfn/distribution.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace lossfn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, std::string_view what) {
  if (!ok) throw DomainError(std::string(what));
}

bool is_probability_open(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }
bool is_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require_integral(double x) {
  if (!std::isnan(x) && std::floor(x) == x) return;
  throw DomainError("discrete distribution requires integer x");
}

// Logarithmic pmf beta p^x / x with beta = -1 / ln(1-p). The cdf has no
// standard special-function form, so head and tail are summed directly.
double logarithmic_head(double p, double k) {
  const double beta = -1.0 / std::log1p(-p);
  double sum = 0.0;
  double comp = 0.0;
  double pow_p = 1.0;
  for (double x = 1.0; x <= k; x += 1.0) {
    pow_p *= p;
    const double term = beta * pow_p / x;
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double logarithmic_tail(double p, double k) {
  const double beta = -1.0 / std::log1p(-p);
  const double geometric_factor = p / (1.0 - p);
  double x = k + 1.0;
  double pow_p = std::exp(x * std::log(p));
  double sum = 0.0;
  for (;;) {
    const double term = beta * pow_p / x;
    sum += term;
    // Remaining terms are bounded by term * p / (1 - p).
    if (term * geometric_factor <= 1e-18 * sum || term == 0.0) break;
    pow_p *= p;
    x += 1.0;
  }
  return sum;
}

double logarithmic_mean(double p) {
  const double log_q = std::log1p(-p);
  return -p / ((1.0 - p) * log_q);
}

}  // namespace

double std_normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double std_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }
double std_normal_sf(double z) noexcept { return 0.5 * std::erfc(z * kInvSqrt2); }

std::string_view to_string(Family family) {
  switch (family) {
    case Family::NegativeBinomial: return "negative_binomial";
    case Family::Geometric: return "geometric";
    case Family::Logarithmic: return "logarithmic";
    case Family::Poisson: return "poisson";
    case Family::Normal: return "normal";
    case Family::Gamma: return "gamma";
    case Family::LogNormal: return "lognormal";
    case Family::Exponential: return "exponential";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  if (name == "log_normal" || name == "log-normal") return Family::LogNormal;
  if (name == "negative-binomial" || name == "negbin") return Family::NegativeBinomial;
  return std::nullopt;
}

std::vector<std::string_view> parameter_names(Family family) {
  switch (family) {
    case Family::NegativeBinomial: return {"n", "p"};
    case Family::Geometric: return {"p"};
    case Family::Logarithmic: return {"p"};
    case Family::Poisson: return {"lambda"};
    case Family::Normal: return {"mu", "sigma"};
    case Family::Gamma: return {"alpha", "beta"};
    case Family::LogNormal: return {"mu", "sigma"};
    case Family::Exponential: return {"beta"};
  }
  return {};
}

bool is_discrete(Family family) {
  switch (family) {
    case Family::NegativeBinomial:
    case Family::Geometric:
    case Family::Logarithmic:
    case Family::Poisson:
      return true;
    default:
      return false;
  }
}

Moments Moments::make(double mean, double variance) {
  require(std::isfinite(mean), "mean must be finite");
  require(std::isfinite(variance) && variance >= 0.0, "variance must be finite and >= 0");
  return Moments{mean, variance};
}

Distribution Distribution::negative_binomial(double n, double p) {
  require(is_positive(n), "negative_binomial requires n > 0");
  require(is_probability_open(p), "negative_binomial requires 0 < p < 1");
  return Distribution(NegativeBinomial{n, p});
}

Distribution Distribution::geometric(double p) {
  require(is_probability_open(p), "geometric requires 0 < p < 1");
  return Distribution(Geometric{p});
}

Distribution Distribution::logarithmic(double p) {
  require(is_probability_open(p), "logarithmic requires 0 < p < 1");
  return Distribution(Logarithmic{p});
}

Distribution Distribution::poisson(double lambda) {
  require(is_positive(lambda), "poisson requires lambda > 0");
  return Distribution(Poisson{lambda});
}

Distribution Distribution::normal(double mu, double sigma) {
  require(std::isfinite(mu), "normal requires finite mu");
  require(is_positive(sigma), "normal requires sigma > 0");
  return Distribution(Normal{mu, sigma});
}

Distribution Distribution::gamma(double alpha, double beta) {
  require(is_positive(alpha), "gamma requires alpha > 0");
  require(is_positive(beta), "gamma requires beta > 0");
  return Distribution(Gamma{alpha, beta});
}

Distribution Distribution::lognormal(double mu, double sigma) {
  require(std::isfinite(mu), "lognormal requires finite mu");
  require(is_positive(sigma), "lognormal requires sigma > 0");
  return Distribution(LogNormal{mu, sigma});
}

Distribution Distribution::exponential(double beta) {
  require(is_positive(beta), "exponential requires beta > 0");
  return Distribution(Exponential{beta});
}

Distribution Distribution::from_params(const DistributionParams& params) {
  return std::visit(
      Overloaded{
          [](const NegativeBinomial& d) { return negative_binomial(d.n, d.p); },
          [](const Geometric& d) { return geometric(d.p); },
          [](const Logarithmic& d) { return logarithmic(d.p); },
          [](const Poisson& d) { return poisson(d.lambda); },
          [](const Normal& d) { return normal(d.mu, d.sigma); },
          [](const Gamma& d) { return gamma(d.alpha, d.beta); },
          [](const LogNormal& d) { return lognormal(d.mu, d.sigma); },
          [](const Exponential& d) { return exponential(d.beta); },
      },
      params);
}

Distribution Distribution::from_named(Family family,
                                      const std::vector<std::pair<std::string, double>>& named) {
  const auto names = parameter_names(family);
  std::vector<std::optional<double>> values(names.size());
  for (const auto& [name, value] : named) {
    bool matched = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != name) continue;
      if (values[i]) throw DomainError("parameter '" + name + "' given more than once");
      values[i] = value;
      matched = true;
    }
    if (!matched) {
      throw DomainError("unknown parameter '" + name + "' for " + std::string(to_string(family)));
    }
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!values[i]) {
      throw DomainError("missing parameter '" + std::string(names[i]) + "' for " +
                        std::string(to_string(family)));
    }
  }
  auto v = [&](std::size_t i) { return *values[i]; };
  switch (family) {
    case Family::NegativeBinomial: return negative_binomial(v(0), v(1));
    case Family::Geometric: return geometric(v(0));
    case Family::Logarithmic: return logarithmic(v(0));
    case Family::Poisson: return poisson(v(0));
    case Family::Normal: return normal(v(0), v(1));
    case Family::Gamma: return gamma(v(0), v(1));
    case Family::LogNormal: return lognormal(v(0), v(1));
    case Family::Exponential: return exponential(v(0));
  }
  throw DomainError("unknown family");
}

Family Distribution::family() const noexcept {
  return static_cast<Family>(params_.index());
}

double Distribution::support_min() const noexcept {
  switch (family()) {
    case Family::Geometric:
    case Family::Logarithmic:
      return 1.0;
    case Family::Normal:
      return -kInf;
    default:
      return 0.0;
  }
}

std::vector<std::pair<std::string_view, double>> Distribution::named_parameters() const {
  const auto names = parameter_names(family());
  std::vector<double> values = std::visit(
      Overloaded{
          [](const NegativeBinomial& d) { return std::vector<double>{d.n, d.p}; },
          [](const Geometric& d) { return std::vector<double>{d.p}; },
          [](const Logarithmic& d) { return std::vector<double>{d.p}; },
          [](const Poisson& d) { return std::vector<double>{d.lambda}; },
          [](const Normal& d) { return std::vector<double>{d.mu, d.sigma}; },
          [](const Gamma& d) { return std::vector<double>{d.alpha, d.beta}; },
          [](const LogNormal& d) { return std::vector<double>{d.mu, d.sigma}; },
          [](const Exponential& d) { return std::vector<double>{d.beta}; },
      },
      params_);
  std::vector<std::pair<std::string_view, double>> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], values[i]);
  return out;
}

Moments Distribution::moments() const noexcept {
  return std::visit(
      Overloaded{
          [](const NegativeBinomial& d) {
            const double q = 1.0 - d.p;
            return Moments{d.n * d.p / q, d.n * d.p / (q * q)};
          },
          [](const Geometric& d) { return Moments{1.0 / d.p, (1.0 - d.p) / (d.p * d.p)}; },
          [](const Logarithmic& d) {
            const double q = 1.0 - d.p;
            const double log_q = std::log1p(-d.p);
            return Moments{logarithmic_mean(d.p),
                           -d.p * (log_q + d.p) / (q * q * log_q * log_q)};
          },
          [](const Poisson& d) { return Moments{d.lambda, d.lambda}; },
          [](const Normal& d) { return Moments{d.mu, d.sigma * d.sigma}; },
          [](const Gamma& d) { return Moments{d.alpha / d.beta, d.alpha / (d.beta * d.beta)}; },
          [](const LogNormal& d) {
            const double s2 = d.sigma * d.sigma;
            return Moments{std::exp(d.mu + 0.5 * s2), std::expm1(s2) * std::exp(2.0 * d.mu + s2)};
          },
          [](const Exponential& d) { return Moments{1.0 / d.beta, 1.0 / (d.beta * d.beta)}; },
      },
      params_);
}

std::string Distribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(family()) << '(';
  bool first = true;
  for (const auto& [name, value] : named_parameters()) {
    if (!first) os << ", ";
    os << name << '=' << value;
    first = false;
  }
  os << ')';
  return os.str();
}

double density(const Distribution& dist, double x) {
  if (dist.discrete()) require_integral(x);
  if (std::isnan(x)) return kNaN;
  if (std::isinf(x)) return 0.0;
  return std::visit(
      Overloaded{
          [x](const NegativeBinomial& d) {
            if (x < 0.0) return 0.0;
            // C(x+n-1, x) q^n p^x = q / (n + x) * d/dq I_q(n, x+1)
            const double q = 1.0 - d.p;
            return q / (d.n + x) * boost::math::ibeta_derivative(d.n, x + 1.0, q);
          },
          [x](const Geometric& d) {
            if (x < 1.0) return 0.0;
            return d.p * std::exp((x - 1.0) * std::log1p(-d.p));
          },
          [x](const Logarithmic& d) {
            if (x < 1.0) return 0.0;
            return -std::exp(x * std::log(d.p)) / (x * std::log1p(-d.p));
          },
          [x](const Poisson& d) {
            if (x < 0.0) return 0.0;
            return boost::math::gamma_p_derivative(x + 1.0, d.lambda);
          },
          [x](const Normal& d) { return std_normal_pdf((x - d.mu) / d.sigma) / d.sigma; },
          [x](const Gamma& d) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) {
              if (d.alpha < 1.0) return kInf;
              return d.alpha == 1.0 ? d.beta : 0.0;
            }
            return d.beta * boost::math::gamma_p_derivative(d.alpha, d.beta * x);
          },
          [x](const LogNormal& d) {
            if (x <= 0.0) return 0.0;
            return std_normal_pdf((std::log(x) - d.mu) / d.sigma) / (x * d.sigma);
          },
          [x](const Exponential& d) {
            if (x < 0.0) return 0.0;
            return d.beta * std::exp(-d.beta * x);
          },
      },
      dist.params());
}

namespace {

// Shared by cdf and survival: returns {F(x), 1 - F(x)}, each computed in the
// form that is accurate where it is small.
std::pair<double, double> cdf_pair(const Distribution& dist, double x) {
  if (std::isnan(x)) return {kNaN, kNaN};
  if (x == kInf) return {1.0, 0.0};
  if (dist.discrete()) x = std::floor(x);
  if (x < dist.support_min()) return {0.0, 1.0};
  return std::visit(
      Overloaded{
          [x](const NegativeBinomial& d) {
            const double q = 1.0 - d.p;
            return std::pair{boost::math::ibeta(d.n, x + 1.0, q),
                             boost::math::ibetac(d.n, x + 1.0, q)};
          },
          [x](const Geometric& d) {
            const double log_q = std::log1p(-d.p);
            return std::pair{-std::expm1(x * log_q), std::exp(x * log_q)};
          },
          [x](const Logarithmic& d) {
            if (x < logarithmic_mean(d.p)) {
              const double head = logarithmic_head(d.p, x);
              return std::pair{head, 1.0 - head};
            }
            const double tail = logarithmic_tail(d.p, x);
            return std::pair{1.0 - tail, tail};
          },
          [x](const Poisson& d) {
            return std::pair{boost::math::gamma_q(x + 1.0, d.lambda),
                             boost::math::gamma_p(x + 1.0, d.lambda)};
          },
          [x](const Normal& d) {
            const double z = (x - d.mu) / d.sigma;
            return std::pair{std_normal_cdf(z), std_normal_sf(z)};
          },
          [x](const Gamma& d) {
            return std::pair{boost::math::gamma_p(d.alpha, d.beta * x),
                             boost::math::gamma_q(d.alpha, d.beta * x)};
          },
          [x](const LogNormal& d) {
            if (x <= 0.0) return std::pair{0.0, 1.0};
            const double z = (std::log(x) - d.mu) / d.sigma;
            return std::pair{std_normal_cdf(z), std_normal_sf(z)};
          },
          [x](const Exponential& d) {
            return std::pair{-std::expm1(-d.beta * x), std::exp(-d.beta * x)};
          },
      },
      dist.params());
}

}  // namespace

double cdf(const Distribution& dist, double x) { return cdf_pair(dist, x).first; }

double survival(const Distribution& dist, double x) { return cdf_pair(dist, x).second; }

namespace {

[[noreturn]] void infeasible(Family family, const std::string& why) {
  throw InfeasibleMoments(std::string(to_string(family)) + " cannot match moments: " + why);
}

}  // namespace

double fit_logarithmic_closed_form(double mean) {
  if (!(mean > 1.0) || !std::isfinite(mean)) infeasible(Family::Logarithmic, "mean must exceed 1");
  const double inv = 1.0 / mean;
  const double w = lambert_w_neg1(-std::exp(-inv) * inv);
  return -std::expm1(w + inv);
}

double fit_logarithmic_bisection(double mean) {
  if (!(mean > 1.0) || !std::isfinite(mean)) infeasible(Family::Logarithmic, "mean must exceed 1");
  // The mean increases monotonically from 1 (p -> 0) to infinity (p -> 1).
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (logarithmic_mean(mid) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Distribution fit_from_moments(Family family, const Moments& m) {
  const double mean = m.mean;
  const double var = m.variance;
  switch (family) {
    case Family::NegativeBinomial:
      if (!(mean > 0.0)) infeasible(family, "mean must be positive");
      if (!(var > mean)) infeasible(family, "variance must exceed the mean");
      return Distribution::negative_binomial(mean * mean / (var - mean), 1.0 - mean / var);
    case Family::Geometric:
      if (!(mean > 1.0)) infeasible(family, "mean must exceed 1");
      return Distribution::geometric(1.0 / mean);
    case Family::Logarithmic: {
      double p = fit_logarithmic_closed_form(mean);
      const bool reproduces = p > 0.0 && p < 1.0 &&
                              std::abs(logarithmic_mean(p) - mean) <= 1e-12 * mean;
      if (!reproduces) p = fit_logarithmic_bisection(mean);
      return Distribution::logarithmic(p);
    }
    case Family::Poisson:
      if (!(mean > 0.0)) infeasible(family, "mean must be positive");
      return Distribution::poisson(mean);
    case Family::Normal:
      if (!(var > 0.0)) infeasible(family, "variance must be positive");
      return Distribution::normal(mean, std::sqrt(var));
    case Family::Gamma:
      if (!(mean > 0.0)) infeasible(family, "mean must be positive");
      if (!(var > 0.0)) infeasible(family, "variance must be positive");
      return Distribution::gamma(mean * mean / var, mean / var);
    case Family::LogNormal: {
      if (!(mean > 0.0)) infeasible(family, "mean must be positive");
      if (!(var > 0.0)) infeasible(family, "variance must be positive");
      const double log1p_cv2 = std::log1p(var / (mean * mean));
      return Distribution::lognormal(std::log(mean) - 0.5 * log1p_cv2, std::sqrt(log1p_cv2));
    }
    case Family::Exponential:
      if (!(mean > 0.0)) infeasible(family, "mean must be positive");
      return Distribution::exponential(1.0 / mean);
  }
  throw DomainError("unknown family");
}

std::string_view to_string(DispersionRecommendation rec) {
  switch (rec) {
    case DispersionRecommendation::Poisson: return "poisson";
    case DispersionRecommendation::NegativeBinomial: return "negative_binomial";
    case DispersionRecommendation::Underdispersed: return "underdispersed";
    case DispersionRecommendation::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

DispersionClass classify_dispersion(const Moments& m) {
  require(m.mean > 0.0, "coefficient of dispersion requires mean > 0");
  const double cd = m.variance / m.mean;
  if (cd > 1.1) return {cd, DispersionRecommendation::NegativeBinomial};
  if (cd < 0.9) return {cd, DispersionRecommendation::Underdispersed};
  return {cd, DispersionRecommendation::Poisson};
}

}  // namespace lossfn
