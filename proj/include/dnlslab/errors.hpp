#pragma once
#include <stdexcept>
#include <string>

namespace dnls {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Wrong representation, wrong arity, mismatched grids.
class ContractViolation : public Error {
public:
  using Error::Error;
};

//! Argument outside the domain of an operation (p < 1, K' <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

//! Smallness condition or another physical constraint violated.
class ConstraintError : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

class SingularityError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class GenerationError : public Error {
public:
  using Error::Error;
};

class BlowUpError : public Error {
public:
  BlowUpError(const std::string &msg, double last_valid_time)
      : Error(msg), last_time(last_valid_time) {}
  double last_time;
};

} // namespace dnls
