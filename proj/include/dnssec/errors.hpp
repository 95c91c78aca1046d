#pragma once

#include <stdexcept>
#include <string>

namespace dnssec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class OutOfZone : public Error {
 public:
  using Error::Error;
};

class ZoneParseError : public Error {
 public:
  ZoneParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when a caller breaks a locking or cache contract, e.g. touching a
// cache entry without holding its RRSet lock or releasing a lock twice.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class DerivabilityError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnssec
