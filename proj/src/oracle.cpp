#include "lossfn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace lossfn {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxDepth = 60;
constexpr int kInitialPanels = 8;

// Neumaier compensated sum.
class AccurateSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class Simpson {
 public:
  Simpson(const std::function<double(double)>& fn, std::size_t max_evals)
      : fn_(fn), max_evals_(max_evals) {}

  Estimate integrate(double a, double b, double tol) {
    if (!(b > a)) return {0.0, 0.0};
    AccurateSum value;
    double error = 0.0;
    const double width = (b - a) / kInitialPanels;
    double left = a;
    double f_left = eval(a);
    for (int i = 0; i < kInitialPanels; ++i) {
      const double right = i + 1 == kInitialPanels ? b : a + (i + 1) * width;
      const double mid = 0.5 * (left + right);
      const double f_mid = eval(mid);
      const double f_right = eval(right);
      const double whole = (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
      const Estimate e =
          recurse(left, right, f_left, f_mid, f_right, whole, tol / kInitialPanels, 0);
      value.add(e.value);
      error += e.error;
      left = right;
      f_left = f_right;
    }
    return {value.value(), error};
  }

 private:
  double eval(double x) {
    if (++evals_ > max_evals_) throw NonConvergence("adaptive quadrature exceeded its budget");
    return fn_(x);
  }

  Estimate recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const bool roundoff = std::abs(delta) <= 64.0 * kEps * (std::abs(left) + std::abs(right));
    if (depth >= kMaxDepth || std::abs(delta) <= 15.0 * tol || roundoff || lm <= a || rm >= b) {
      return {left + right + delta / 15.0, std::abs(delta) / 15.0};
    }
    const Estimate l = recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
    const Estimate r = recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    return {l.value + r.value, l.error + r.error};
  }

  const std::function<double(double)>& fn_;
  std::size_t max_evals_;
  std::size_t evals_ = 0;
};

void require_continuous(const Distribution& dist, const char* what) {
  if (dist.discrete()) throw DomainError(std::string(what) + " requires a continuous distribution");
}

void check_level(const Distribution& dist, double r) {
  if (!std::isfinite(r)) throw DomainError("loss level r must be finite");
  if (dist.discrete() && std::floor(r) != r) {
    throw DomainError("discrete distribution requires integer r");
  }
}

// Quantiles at cdf and survival levels 10^-1 ... 10^-12 plus the median.
// Used as breakpoints so each quadrature segment sees one scale of the law.
std::vector<double> quantile_ladder(const Distribution& dist) {
  std::vector<double> ladder;
  ladder.push_back(upper_quantile(dist, 0.5));
  double level = 0.1;
  for (int k = 1; k <= 12; ++k, level *= 0.1) {
    ladder.push_back(lower_quantile(dist, level));
    ladder.push_back(upper_quantile(dist, level));
  }
  std::sort(ladder.begin(), ladder.end());
  return ladder;
}

std::vector<double> breakpoints(const std::vector<double>& ladder, double a, double b,
                                std::initializer_list<double> extra = {}) {
  std::vector<double> pts{a, b};
  for (double x : ladder) {
    if (x > a && x < b) pts.push_back(x);
  }
  for (double x : extra) {
    if (x > a && x < b) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Integrates fn over consecutive segments of pts. A segment that starts at
// a finite support minimum is integrated in t with x = a + (b - a) t^2, which
// removes integrable x^(alpha - 1) singularities at the boundary.
Estimate integrate_segments(const std::function<double(double)>& fn, const std::vector<double>& pts,
                            double support_min, const OracleConfig& cfg) {
  if (pts.size() < 2) return {0.0, 0.0};
  const std::size_t n = pts.size() - 1;

  std::vector<std::function<double(double)>> pieces;
  std::vector<std::pair<double, double>> ranges;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    if (std::isfinite(support_min) && a == support_min) {
      const double width = b - a;
      // The transformed integrand is finite at t = 0; approximate its limit
      // at the smallest t whose image still differs from a.
      const double t0 = std::sqrt(std::max(1e-290, std::abs(a) * 4.0 * kEps) / width);
      pieces.emplace_back([&fn, a, width, t0](double t) {
        const double tt = std::max(t, t0);
        return fn(a + width * tt * tt) * 2.0 * width * tt;
      });
      ranges.emplace_back(0.0, 1.0);
    } else {
      pieces.emplace_back(fn);
      ranges.emplace_back(a, b);
    }
  }

  // Coarse pass sets the scale for the relative tolerance.
  AccurateSum coarse;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = ranges[i];
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    for (int k = 0; k < kPanels; ++k) {
      const double x0 = a + k * h;
      const double x1 = k + 1 == kPanels ? b : x0 + h;
      coarse.add((x1 - x0) / 6.0 * (pieces[i](x0) + 4.0 * pieces[i](0.5 * (x0 + x1)) + pieces[i](x1)));
    }
  }
  const double tol =
      std::max(0.1 * std::min(cfg.abs_tol, cfg.rel_tol * std::abs(coarse.value())), 1e-300);

  AccurateSum total;
  double error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Simpson simpson(pieces[i], cfg.max_terms);
    const Estimate e = simpson.integrate(ranges[i].first, ranges[i].second, tol / n);
    total.add(e.value);
    error += e.error;
  }
  return {total.value(), error};
}

double hazard(const Distribution& dist, double x) {
  const double s = survival(dist, x);
  const double f = density(dist, x);
  if (!(s > 0.0) || !(f > 0.0)) return std::numeric_limits<double>::infinity();
  return f / s;
}

double reverse_hazard(const Distribution& dist, double x) {
  const double c = cdf(dist, x);
  const double f = density(dist, x);
  if (!(c > 0.0) || !(f > 0.0)) return std::numeric_limits<double>::infinity();
  return f / c;
}

// ---------------------------------------------------------------- discrete

// Limit of f(x+1)/f(x) as x grows, which bounds the ratio from above for
// families whose ratio increases towards it.
double limiting_pmf_ratio(const Distribution& dist) {
  switch (dist.family()) {
    case Family::NegativeBinomial: return std::get<NegativeBinomial>(dist.params()).p;
    case Family::Geometric: return 1.0 - std::get<Geometric>(dist.params()).p;
    case Family::Logarithmic: return std::get<Logarithmic>(dist.params()).p;
    default: return 0.0;
  }
}

// Upper-tail sums of (x - r) f(x) (order 1) or (x - r)(x - r - 1) f(x) / 2
// (order 2). Stops once the remaining mass is below cfg.tail_mass and a
// geometric bound on the remaining contribution is negligible; the bound is
// reported as error.
Estimate discrete_upper_sum(const Distribution& dist, double r, int order,
                            const OracleConfig& cfg) {
  const double start = std::max(dist.support_min(), r);
  const double rho_limit = limiting_pmf_ratio(dist);
  AccurateSum sum;
  double f = density(dist, start);
  for (std::size_t n = 0;; ++n) {
    if (n >= cfg.max_terms) throw NonConvergence("discrete oracle exceeded max_terms");
    const double x = start + static_cast<double>(n);
    const double d = x - r;
    sum.add(order == 1 ? d * f : 0.5 * d * (d - 1.0) * f);

    const double f_next = density(dist, x + 1.0);
    const double rho = std::max(f > 0.0 ? f_next / f : 0.0, rho_limit);
    if (rho < 1.0 && survival(dist, x) < cfg.tail_mass) {
      // Sum over j >= 1 of (d + j)^k f rho^j.
      const double g = rho / (1.0 - rho);
      double bound = f * (d * g + g / (1.0 - rho));
      if (order == 2) {
        bound = 0.5 * f *
                (d * d * g + 2.0 * d * g / (1.0 - rho) + g * (1.0 + rho) / ((1.0 - rho) * (1.0 - rho)));
      }
      const double tol = std::min(cfg.abs_tol, cfg.rel_tol * std::abs(sum.value()));
      if (bound <= 1e-3 * tol || bound == 0.0 || f == 0.0) {
        return {sum.value(), bound + 4.0 * kEps * std::abs(sum.value())};
      }
    }
    f = f_next;
  }
}

Estimate discrete_loss(LossKind kind, const Distribution& dist, double r, const OracleConfig& cfg) {
  const double lo = dist.support_min();
  switch (kind) {
    case LossKind::FirstOrder: return discrete_upper_sum(dist, r, 1, cfg);
    case LossKind::SecondOrder: return discrete_upper_sum(dist, r, 2, cfg);
    case LossKind::Complementary: {
      AccurateSum sum;
      for (double x = r; x >= lo; x -= 1.0) sum.add((r - x) * density(dist, x));
      return {sum.value(), 4.0 * kEps * std::abs(sum.value())};
    }
    case LossKind::LimitedExpectedValue: {
      // sum_{x < r} x f(x) + r (1 - sum_{x < r} f(x))
      AccurateSum partial;
      AccurateSum mass;
      for (double x = lo; x < r; x += 1.0) {
        const double f = density(dist, x);
        partial.add(x * f);
        mass.add(f);
      }
      const double value = partial.value() + r * (1.0 - mass.value());
      return {value, 8.0 * kEps * (std::abs(value) + std::abs(r))};
    }
  }
  throw DomainError("unknown loss kind");
}

// -------------------------------------------------------------- continuous

struct UpperIntegral {
  Estimate estimate;
  double end;  // the integral covers [a, end]
};

// Integral of fn over [a, b] where survival(b) = s_a * tail_mass, then
// extended decade by decade in survival until a further segment no longer
// matters at the requested tolerance. Heavy tails (log-normal moments) carry
// weight far beyond the tail_mass quantile.
UpperIntegral integrate_upper(const Distribution& dist, const std::function<double(double)>& fn,
                              double a, double s_a, const std::vector<double>& ladder,
                              double substitution_at, const OracleConfig& cfg) {
  double level = s_a * cfg.tail_mass;
  double end = upper_quantile(dist, level);
  if (!(end > a)) return {{0.0, 0.0}, a};
  Estimate total = integrate_segments(fn, breakpoints(ladder, a, end), substitution_at, cfg);
  const double no_substitution = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 300; ++k) {
    const double negligible = 1e-3 * std::min(cfg.abs_tol, cfg.rel_tol * std::abs(total.value));
    level *= 0.1;
    if (level < 1e-300) break;
    const double next = upper_quantile(dist, level);
    if (!(next > end)) break;
    const Estimate segment = integrate_segments(fn, {end, next}, no_substitution, cfg);
    total.value += segment.value;
    total.error += segment.error;
    end = next;
    if (std::abs(segment.value) <= negligible) break;
  }
  return {total, end};
}

Estimate continuous_upper(const Distribution& dist, double r, int order,
                          const std::vector<double>& ladder, const OracleConfig& cfg) {
  const double smin = dist.support_min();
  const double a = std::max(r, smin);
  const double s_a = a == smin ? 1.0 : survival(dist, a);
  if (s_a == 0.0) return {0.0, 0.0};

  const std::function<double(double)> integrand = [&](double x) {
    const double d = x - r;
    return (order == 1 ? d : 0.5 * d * d) * density(dist, x);
  };
  const UpperIntegral body = integrate_upper(dist, integrand, a, s_a, ladder, smin, cfg);
  const double b = body.end;

  // Beyond b, treat the tail as exponential with the local hazard rate.
  const double s_b = survival(dist, b);
  const double h = hazard(dist, b);
  const double d = b - r;
  double tail = 0.0;
  if (s_b > 0.0 && std::isfinite(h)) {
    const double m = 1.0 / h;
    tail = order == 1 ? s_b * (d + m) : 0.5 * s_b * (d * d + 2.0 * d * m + 2.0 * m * m);
  }
  return {body.estimate.value + tail, body.estimate.error + std::abs(tail)};
}

// Integral over (lo, r] of weight(x) f(x), with the lower tail of an
// unbounded law estimated like the upper one.
Estimate continuous_lower(const Distribution& dist, double r, bool raw_moment,
                          const std::vector<double>& ladder, const OracleConfig& cfg) {
  const double smin = dist.support_min();
  double lo = smin;
  if (!std::isfinite(smin)) lo = lower_quantile(dist, cdf(dist, r) * cfg.tail_mass);
  if (!(r > lo)) return {0.0, 0.0};

  const std::function<double(double)> integrand = [&](double x) {
    return (raw_moment ? x : r - x) * density(dist, x);
  };
  Estimate e = integrate_segments(integrand, breakpoints(ladder, lo, r), smin, cfg);

  double tail = 0.0;
  if (!std::isfinite(smin)) {
    const double c = cdf(dist, lo);
    const double h = reverse_hazard(dist, lo);
    if (c > 0.0 && std::isfinite(h)) tail = raw_moment ? c * (lo - 1.0 / h) : c * (r - lo + 1.0 / h);
  }
  return {e.value + tail, e.error + std::abs(tail)};
}

Estimate continuous_loss(LossKind kind, const Distribution& dist, double r,
                         const OracleConfig& cfg) {
  const auto ladder = quantile_ladder(dist);
  switch (kind) {
    case LossKind::FirstOrder: return continuous_upper(dist, r, 1, ladder, cfg);
    case LossKind::SecondOrder: return continuous_upper(dist, r, 2, ladder, cfg);
    case LossKind::Complementary: return continuous_lower(dist, r, false, ladder, cfg);
    case LossKind::LimitedExpectedValue: {
      // integral_{-inf}^{r} x f(x) dx + r (1 - F(r))
      if (r <= dist.support_min()) return {r, 0.0};
      const Estimate lower = continuous_lower(dist, r, true, ladder, cfg);
      return {lower.value + r * survival(dist, r), lower.error};
    }
  }
  throw DomainError("unknown loss kind");
}

}  // namespace

void OracleConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_mass > 0.0) || max_terms == 0) {
    throw DomainError("oracle configuration values must be strictly positive");
  }
}

OracleReport OracleReport::compare(double analytic, double oracle, double abs_tol, double rel_tol) {
  const double abs_err = std::abs(analytic - oracle);
  const double rel_err = abs_err / std::max(1e-300, std::abs(oracle));
  return {analytic, oracle, abs_err, rel_err, abs_err <= abs_tol || rel_err <= rel_tol};
}

Estimate adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                          std::size_t max_evals) {
  Simpson simpson(fn, max_evals);
  return simpson.integrate(a, b, tol);
}

double upper_quantile(const Distribution& dist, double level) {
  require_continuous(dist, "upper_quantile");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  const Moments m = dist.moments();
  const double smin = dist.support_min();
  const double x0 = m.mean;
  double step = std::max(std::sqrt(m.variance), 1e-12 * std::max(1.0, std::abs(x0)));
  double lo;
  double hi;
  if (survival(dist, x0) > level) {
    lo = x0;
    hi = x0 + step;
    while (survival(dist, hi) > level) {
      lo = hi;
      step *= 2.0;
      hi = x0 + step;
    }
  } else {
    hi = x0;
    lo = x0 - step;
    while (lo > smin && survival(dist, lo) <= level) {
      hi = lo;
      step *= 2.0;
      lo = x0 - step;
    }
    lo = std::max(lo, smin);
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (survival(dist, mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double lower_quantile(const Distribution& dist, double level) {
  require_continuous(dist, "lower_quantile");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  const Moments m = dist.moments();
  const double smin = dist.support_min();
  const double x0 = m.mean;
  double step = std::max(std::sqrt(m.variance), 1e-12 * std::max(1.0, std::abs(x0)));
  double lo;
  double hi;
  if (cdf(dist, x0) > level) {
    hi = x0;
    lo = x0 - step;
    while (lo > smin && cdf(dist, lo) > level) {
      hi = lo;
      step *= 2.0;
      lo = x0 - step;
    }
    lo = std::max(lo, smin);
  } else {
    lo = x0;
    hi = x0 + step;
    while (cdf(dist, hi) <= level) {
      lo = hi;
      step *= 2.0;
      hi = x0 + step;
    }
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(dist, mid) > level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

Estimate numeric_loss_estimate(LossKind kind, const Distribution& dist, double r,
                               const OracleConfig& cfg) {
  cfg.validate();
  check_level(dist, r);
  if (dist.discrete()) return discrete_loss(kind, dist, r, cfg);
  return continuous_loss(kind, dist, r, cfg);
}

double numeric_integral_of_loss1(const Distribution& dist, double r, const OracleConfig& cfg) {
  cfg.validate();
  require_continuous(dist, "numeric_integral_of_loss1");
  check_level(dist, r);
  const double smin = dist.support_min();
  const double s_r = r <= smin ? 1.0 : survival(dist, r);
  if (s_r == 0.0) return 0.0;
  const std::function<double(double)> integrand = [&](double x) { return loss1(dist, x); };
  // L1 has a kink at the support minimum but no singularity, so the ladder
  // gains that breakpoint and no substitution is applied.
  auto ladder = quantile_ladder(dist);
  if (std::isfinite(smin)) ladder.push_back(smin);
  std::sort(ladder.begin(), ladder.end());
  const UpperIntegral body = integrate_upper(dist, integrand, r, s_r, ladder,
                                             -std::numeric_limits<double>::infinity(), cfg);
  const double h = hazard(dist, body.end);
  const double tail = std::isfinite(h) ? loss1(dist, body.end) / h : 0.0;
  return body.estimate.value + tail;
}

double numeric_stockout_frequency(const Distribution& dist, double r, double q,
                                  const OracleConfig& cfg) {
  cfg.validate();
  require_continuous(dist, "numeric_stockout_frequency");
  if (!(q > 0.0) || !std::isfinite(q) || !std::isfinite(r)) {
    throw DomainError("stockout frequency requires finite r and q > 0");
  }
  const std::function<double(double)> integrand = [&](double x) { return survival(dist, x); };
  const double smin = dist.support_min();
  const Estimate e = integrate_segments(
      integrand, breakpoints(quantile_ladder(dist), r, r + q, {smin}),
      -std::numeric_limits<double>::infinity(), cfg);
  return e.value / q;
}

double numeric_expected_backorders(const Distribution& dist, double r, double q,
                                   const OracleConfig& cfg) {
  cfg.validate();
  require_continuous(dist, "numeric_expected_backorders");
  if (!(q > 0.0) || !std::isfinite(q) || !std::isfinite(r)) {
    throw DomainError("expected backorders requires finite r and q > 0");
  }
  const auto ladder = quantile_ladder(dist);
  const double smin = dist.support_min();
  const double no_substitution = -std::numeric_limits<double>::infinity();

  // Inner integral over u in [r, r+Q] of 1 - F(u - x), written with t = -x.
  const std::function<double(double)> inner = [&](double t) {
    const std::function<double(double)> integrand = [&](double u) {
      return survival(dist, u + t);
    };
    return integrate_segments(integrand, breakpoints(ladder, r, r + q, {smin - t}),
                              no_substitution, cfg)
        .value;
  };

  const double b = upper_quantile(dist, cfg.tail_mass);
  const double t_max = b - r;
  if (!(t_max > 0.0)) return 0.0;
  std::vector<double> outer_pts{0.0, t_max};
  for (double x : ladder) {
    for (double shift : {x - r, x - r - q}) {
      if (shift > 0.0 && shift < t_max) outer_pts.push_back(shift);
    }
  }
  if (std::isfinite(smin)) {
    for (double shift : {smin - r, smin - r - q}) {
      if (shift > 0.0 && shift < t_max) outer_pts.push_back(shift);
    }
  }
  std::sort(outer_pts.begin(), outer_pts.end());
  outer_pts.erase(std::unique(outer_pts.begin(), outer_pts.end()), outer_pts.end());

  // The inner values carry quadrature noise near cfg.abs_tol, so the outer
  // pass has to stop well above it or it never settles.
  OracleConfig outer_cfg = cfg;
  outer_cfg.abs_tol = cfg.abs_tol * 1e4;
  outer_cfg.rel_tol = cfg.rel_tol * 1e2;
  const Estimate outer = integrate_segments(inner, outer_pts, no_substitution, outer_cfg);
  // Beyond t_max the inner integral decays at roughly the hazard rate at b.
  const double h = hazard(dist, b);
  const double tail = std::isfinite(h) ? inner(t_max) / h : 0.0;
  return (outer.value + tail) / q;
}

}  // namespace lossfn
