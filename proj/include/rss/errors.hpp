#pragma once

#include <stdexcept>
#include <string>

namespace rss {

// A draw or table was requested for a design that cannot run on the given
// population size (e.g. level-2 needs m*k^2 <= N).
class infeasible_design_error : public std::runtime_error {
 public:
  explicit infeasible_design_error(const std::string& what)
      : std::runtime_error(what) {}
};

// An exact computation would exceed its configured state/outcome budget.
// Callers should fall back to Monte Carlo or raise the budget explicitly.
class budget_exceeded_error : public std::runtime_error {
 public:
  explicit budget_exceeded_error(const std::string& what)
      : std::runtime_error(what) {}
};

// An invariant check failed (used by the verification battery).
class verification_error : public std::runtime_error {
 public:
  explicit verification_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rss
