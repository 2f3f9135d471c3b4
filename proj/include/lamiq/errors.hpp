#pragma once

#include <stdexcept>
#include <string>

namespace lamiq {

// Error families map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Bad input: domain violations, malformed spec files, dimension mismatches.
class InvalidInput : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A configured budget (draws, orbit cap, bisection depth) ran out.
class ResourceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Internal tripwires: an exact identity that must hold did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

class IncompatibleRadicand : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

/// A fit sample or held-out check disagreed with its phase.
class PhaseContamination : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

}  // namespace lamiq
