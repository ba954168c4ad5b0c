#pragma once

// Analytic-versus-oracle verification grid shared by the `verify` command
// and the acceptance suite.

#include <optional>
#include <string>
#include <vector>

#include "lossfn/distribution.hpp"
#include "lossfn/oracle.hpp"

namespace lossfn {

// At least five parameter settings per family, spanning the legal range.
std::vector<Distribution> parameter_grid(Family family);

// Levels r from the support minimum (0.0001 quantile for the normal) to the
// 0.9999 quantile, at least min_points of them. Integers for discrete laws.
std::vector<double> level_grid(const Distribution& dist, std::size_t min_points = 20);

struct VerifyOptions {
  std::optional<Family> family;  // restrict to one family
  // Relative tolerance for continuous laws; discrete and identity checks
  // use tol / 100 absolute.
  double tol = 1e-8;
  OracleConfig oracle;
  unsigned threads = 1;
};

struct VerifyCase {
  Distribution dist;
  std::string check;  // "L1", "Lc", "L2" or "identity"
  double r;
  OracleReport report;
};

struct VerifyResult {
  std::vector<VerifyCase> cases;
  std::size_t failed = 0;
};

// Throws NonConvergence if the oracle cannot finish a case.
VerifyResult run_verification(const VerifyOptions& options);

}  // namespace lossfn
