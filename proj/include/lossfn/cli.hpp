#pragma once

// Command-line front end: eval, fit, policy and verify subcommands.
//
// Exit statuses: 0 success, 1 verification failure, 2 usage or domain error,
// 3 internal numeric failure. Results go to `out`, diagnostics to `err`.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lossfn/distribution.hpp"
#include "lossfn/loss.hpp"

namespace lossfn {

enum class Subcommand { Eval, Fit, Policy, Verify };
enum class OutputFormat { Json, Csv, Table };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct CliRequest {
  Subcommand subcommand = Subcommand::Eval;
  std::optional<Family> dist;
  std::vector<std::pair<std::string, double>> params;
  std::optional<LossKind> loss;
  std::optional<double> r;
  std::optional<double> q;
  std::optional<double> mean;
  std::optional<double> variance;
  std::optional<double> target;
  OutputFormat format = OutputFormat::Json;
  std::optional<double> tol;
  unsigned threads = 1;
};

// "mu=0,sigma=1" -> {{"mu", 0}, {"sigma", 1}}. Throws DomainError.
std::vector<std::pair<std::string, double>> parse_params(const std::string& text);

std::optional<OutputFormat> parse_format(std::string_view name);

// Each run_* writes one record (or report) and returns the exit status.
// Domain errors propagate as exceptions; run_cli maps them to statuses.
int run_eval(const CliRequest& req, std::ostream& out);
int run_fit(const CliRequest& req, std::ostream& out);
int run_policy(const CliRequest& req, std::ostream& out);
int run_verify(const CliRequest& req, std::ostream& out);

// Parses argv and dispatches. LOSSFN_FORMAT sets the default --format.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lossfn
