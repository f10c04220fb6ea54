#pragma once

#include <stdexcept>
#include <string>

namespace qbattery {

/// Invalid user-supplied parameters or configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation left its domain of validity (clip mass too large, no sign
/// change in a bracket, non-normalizable state, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The battery never charges within the search horizon.
class NoTransferError : public NumericalError {
 public:
  NoTransferError(const std::string& what, double max_work)
      : NumericalError(what), max_work_(max_work) {}
  double max_work() const noexcept { return max_work_; }

 private:
  double max_work_;
};

}  // namespace qbattery
