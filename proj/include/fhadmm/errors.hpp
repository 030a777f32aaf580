#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fhadmm {

/// A value left the open interval (-1, 1) where the logarithmic terms live,
/// or two fields on different grids were combined.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid parameters or configuration. `key()` names the offending entry
/// (e.g. "potential.theta0") when one is known.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& msg, std::string key = {})
      : std::invalid_argument(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

/// An iterative solver stopped at its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& msg, std::vector<double> history = {})
      : std::runtime_error(msg), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fhadmm
