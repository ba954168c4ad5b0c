#include "lossfn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lossfn/policy.hpp"
#include "lossfn/verify.hpp"

namespace lossfn {
namespace {

using Json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json params_json(const Distribution& dist) {
  Json obj = Json::object();
  for (const auto& [name, value] : dist.named_parameters()) obj[std::string(name)] = value;
  return obj;
}

// name=value pairs joined by ';' so the field needs no CSV quoting.
std::string params_csv(const Distribution& dist) {
  std::string s;
  for (const auto& [name, value] : dist.named_parameters()) {
    if (!s.empty()) s += ';';
    s += std::string(name) + '=' + fmt17(value);
  }
  return s;
}

// Single record in the three formats. Fields keep insertion order.
class Record {
 public:
  Record& add(const std::string& key, double value) {
    json_[key] = value;
    csv_.emplace_back(key, fmt17(value));
    return *this;
  }
  Record& add(const std::string& key, const std::string& value) {
    json_[key] = value;
    csv_.emplace_back(key, value);
    return *this;
  }
  Record& add_params(const Distribution& dist) {
    json_["parameters"] = params_json(dist);
    csv_.emplace_back("parameters", params_csv(dist));
    return *this;
  }
  Record& add_empty(const std::string& key) {
    csv_.emplace_back(key, "");
    return *this;
  }

  void write(OutputFormat format, std::ostream& out) const {
    switch (format) {
      case OutputFormat::Json:
        out << json_.dump(2) << '\n';
        break;
      case OutputFormat::Csv: {
        for (std::size_t i = 0; i < csv_.size(); ++i) out << (i ? "," : "") << csv_[i].first;
        out << '\n';
        for (std::size_t i = 0; i < csv_.size(); ++i) out << (i ? "," : "") << csv_[i].second;
        out << '\n';
        break;
      }
      case OutputFormat::Table: {
        std::size_t width = 0;
        for (const auto& [k, v] : csv_) width = std::max(width, k.size());
        for (const auto& [k, v] : csv_) {
          if (v.empty()) continue;
          out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
        }
        break;
      }
    }
  }

 private:
  Json json_ = Json::object();
  std::vector<std::pair<std::string, std::string>> csv_;
};

template <class T>
const T& need(const std::optional<T>& value, const char* what) {
  if (!value) throw DomainError(std::string("missing required option ") + what);
  return *value;
}

Distribution request_distribution(const CliRequest& req) {
  return Distribution::from_named(need(req.dist, "--dist"), req.params);
}

}  // namespace

std::vector<std::pair<std::string, double>> parse_params(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DomainError("parameter '" + item + "' is not of the form name=value");
    }
    const std::string name = item.substr(0, eq);
    const std::string value_text = item.substr(eq + 1);
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (value_text.empty() || end != value_text.c_str() + value_text.size()) {
      throw DomainError("parameter '" + name + "' has a non-numeric value '" + value_text + "'");
    }
    out.emplace_back(name, value);
  }
  return out;
}

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "table") return OutputFormat::Table;
  return std::nullopt;
}

int run_eval(const CliRequest& req, std::ostream& out) {
  const Distribution dist = request_distribution(req);
  const LossKind kind = need(req.loss, "--loss");
  const double r = need(req.r, "--r");
  const double value = evaluate_loss(kind, dist, r);
  Record rec;
  rec.add("distribution", std::string(to_string(dist.family())))
      .add_params(dist)
      .add("loss_kind", std::string(to_string(kind)))
      .add("r", r)
      .add("value", value);
  rec.write(req.format, out);
  return kExitOk;
}

int run_fit(const CliRequest& req, std::ostream& out) {
  const double mean = need(req.mean, "--mean");
  Record rec;
  if (!req.dist) {
    const Moments m = Moments::make(mean, need(req.variance, "--var"));
    const DispersionClass dc = classify_dispersion(m);
    rec.add("mean", m.mean)
        .add("variance", m.variance)
        .add("cd", dc.cd)
        .add("recommendation", std::string(to_string(dc.recommendation)));
    rec.write(req.format, out);
    return kExitOk;
  }
  const Family family = *req.dist;
  const bool one_parameter = parameter_names(family).size() == 1;
  if (!one_parameter && !req.variance) {
    throw DomainError(std::string(to_string(family)) + " fit requires --var");
  }
  const Moments m = Moments::make(mean, req.variance.value_or(0.0));
  const Distribution fitted = fit_from_moments(family, m);
  const Moments achieved = fitted.moments();
  rec.add("distribution", std::string(to_string(family))).add_params(fitted).add("mean", m.mean);
  if (req.variance) {
    rec.add("variance", m.variance);
  } else {
    rec.add_empty("variance");
  }
  rec.add("achieved_mean", achieved.mean).add("achieved_variance", achieved.variance);
  rec.write(req.format, out);
  return kExitOk;
}

int run_policy(const CliRequest& req, std::ostream& out) {
  const Distribution dist = request_distribution(req);
  const PolicyParams policy{need(req.r, "--r"), need(req.q, "--q")};
  const PolicyMeasures measures = evaluate_policy(dist, policy);
  Record rec;
  rec.add("distribution", std::string(to_string(dist.family())))
      .add_params(dist)
      .add("r", policy.r)
      .add("q", policy.q)
      .add("stockout_frequency", measures.stockout_frequency)
      .add("expected_backorders", measures.expected_backorders);
  if (req.target) {
    rec.add("target", *req.target).add("reorder_point", min_reorder_point(dist, policy.q, *req.target));
  } else {
    rec.add_empty("target").add_empty("reorder_point");
  }
  rec.write(req.format, out);
  return kExitOk;
}

int run_verify(const CliRequest& req, std::ostream& out) {
  VerifyOptions options;
  options.family = req.dist;
  options.tol = req.tol.value_or(1e-8);
  options.threads = req.threads;
  const VerifyResult result = run_verification(options);
  const std::size_t total = result.cases.size();

  switch (req.format) {
    case OutputFormat::Json: {
      Json cases = Json::array();
      for (const auto& c : result.cases) {
        cases.push_back(Json{{"distribution", std::string(to_string(c.dist.family()))},
                             {"parameters", params_json(c.dist)},
                             {"check", c.check},
                             {"r", c.r},
                             {"analytic", c.report.analytic},
                             {"oracle", c.report.oracle},
                             {"abs_err", c.report.abs_err},
                             {"rel_err", c.report.rel_err},
                             {"passed", c.report.passed}});
      }
      Json doc{{"tolerance", options.tol},
               {"cases", std::move(cases)},
               {"summary", Json{{"total", total},
                                {"passed", total - result.failed},
                                {"failed", result.failed}}}};
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
      out << "distribution,parameters,check,r,analytic,oracle,abs_err,rel_err,passed\n";
      for (const auto& c : result.cases) {
        out << to_string(c.dist.family()) << ',' << params_csv(c.dist) << ',' << c.check << ','
            << fmt17(c.r) << ',' << fmt17(c.report.analytic) << ',' << fmt17(c.report.oracle)
            << ',' << fmt17(c.report.abs_err) << ',' << fmt17(c.report.rel_err) << ','
            << (c.report.passed ? "true" : "false") << '\n';
      }
      break;
    case OutputFormat::Table:
      for (const auto& c : result.cases) {
        if (c.report.passed) continue;
        out << "FAIL " << c.dist.describe() << ' ' << c.check << " r=" << fmt17(c.r)
            << " analytic=" << fmt17(c.report.analytic) << " oracle=" << fmt17(c.report.oracle)
            << " rel_err=" << fmt17(c.report.rel_err) << '\n';
      }
      out << "cases " << total << ", passed " << total - result.failed << ", failed "
          << result.failed << " (tol " << fmt17(options.tol) << ")\n";
      break;
  }
  return result.failed == 0 ? kExitOk : kExitVerifyFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytic loss functions for inventory demand distributions"};
  app.require_subcommand(1);
  app.fallthrough();

  CliRequest req;
  std::string format_text;
  if (const char* env = std::getenv("LOSSFN_FORMAT"); env != nullptr && *env != '\0') {
    format_text = env;
  } else {
    format_text = "json";
  }
  app.add_option("--format", format_text, "Output format: json, csv or table (env LOSSFN_FORMAT)");

  std::string dist_text;
  std::string params_text;
  std::string loss_text;
  double r = 0.0;
  double q = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double target = 0.0;
  double tol = 0.0;

  auto* eval = app.add_subcommand("eval", "Evaluate one loss function");
  eval->add_option("--dist", dist_text, "Distribution family")->required();
  eval->add_option("--params", params_text, "Parameters as name=value,...")->required();
  eval->add_option("--loss", loss_text, "L1, Lc, L2 or Le")->required();
  eval->add_option("--r", r, "Level r")->required();

  auto* fit = app.add_subcommand("fit", "Method-of-moments fit or dispersion classification");
  auto* fit_dist = fit->add_option("--dist", dist_text, "Distribution family (omit to classify)");
  fit->add_option("--mean", mean, "Mean")->required();
  auto* fit_var = fit->add_option("--var", variance, "Variance");

  auto* policy = app.add_subcommand("policy", "(r, Q) policy measures");
  policy->add_option("--dist", dist_text, "Lead-time demand family")->required();
  policy->add_option("--params", params_text, "Parameters as name=value,...")->required();
  policy->add_option("--r", r, "Reorder point")->required();
  policy->add_option("--q", q, "Order quantity")->required();
  auto* policy_target =
      policy->add_option("--target", target, "Stockout frequency target; reports the minimal r");

  auto* verify = app.add_subcommand("verify", "Run the analytic-versus-oracle grid");
  auto* verify_dist = verify->add_option("--dist", dist_text, "Restrict to one family");
  auto* verify_tol = verify->add_option("--tol", tol, "Tolerance (default 1e-8)");
  verify->add_option("--threads", req.threads, "Worker threads, one family each");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const auto format = parse_format(format_text);
    if (!format) throw DomainError("unknown output format '" + format_text + "'");
    req.format = *format;

    auto set_dist = [&] {
      const auto family = parse_family(dist_text);
      if (!family) throw DomainError("unknown distribution family '" + dist_text + "'");
      req.dist = family;
    };

    if (eval->parsed()) {
      req.subcommand = Subcommand::Eval;
      set_dist();
      req.params = parse_params(params_text);
      req.loss = parse_loss_kind(loss_text);
      if (!req.loss) throw DomainError("unknown loss kind '" + loss_text + "' (use L1, Lc, L2, Le)");
      req.r = r;
      return run_eval(req, out);
    }
    if (fit->parsed()) {
      req.subcommand = Subcommand::Fit;
      if (fit_dist->count() > 0) set_dist();
      req.mean = mean;
      if (fit_var->count() > 0) req.variance = variance;
      return run_fit(req, out);
    }
    if (policy->parsed()) {
      req.subcommand = Subcommand::Policy;
      set_dist();
      req.params = parse_params(params_text);
      req.r = r;
      req.q = q;
      if (policy_target->count() > 0) req.target = target;
      return run_policy(req, out);
    }
    req.subcommand = Subcommand::Verify;
    if (verify_dist->count() > 0) set_dist();
    if (verify_tol->count() > 0) req.tol = tol;
    const int status = run_verify(req, out);
    if (status != kExitOk) err << "verify: failures found\n";
    return status;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonConvergence& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace lossfn
