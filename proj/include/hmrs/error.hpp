#pragma once

#include <stdexcept>
#include <string>

namespace hmrs {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes: ConfigError -> 1, DataError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

// Singular normal equations (only reachable with zero ridge penalty).
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmrs
