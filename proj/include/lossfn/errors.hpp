#pragma once

#include <stdexcept>
#include <string>

namespace lossfn {

// Argument outside the mathematical domain of an operation (bad parameter,
// non-integer point for a discrete distribution, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Mean/variance pair that no member of the requested family can reproduce.
class InfeasibleMoments : public DomainError {
 public:
  explicit InfeasibleMoments(const std::string& what) : DomainError(what) {}
};

// A numeric procedure ran out of its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lossfn
