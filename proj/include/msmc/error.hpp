#pragma once

#include <stdexcept>
#include <string>

namespace msmc {

/// Input that violates an operation's preconditions (non-ergodic chain,
/// non-stationary AR polynomial, malformed file, ...).
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A sample on which a statistic is undefined: an empty partition or zero
/// dispersion. Simulated replicates that raise this are redrawn.
class DegenerateSample : public std::domain_error {
public:
  DegenerateSample(std::string statistic, const std::string& what)
      : std::domain_error(statistic + ": " + what), statistic_(std::move(statistic)) {}

  const std::string& statistic() const noexcept { return statistic_; }

private:
  std::string statistic_;
};

/// Regressor matrix without full column rank.
class RankDeficient : public std::runtime_error {
public:
  explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative fit that failed to converge.
class ConvergenceFailure : public std::runtime_error {
public:
  explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace msmc
