#ifndef LEVERALIGN_ERROR_HPP
#define LEVERALIGN_ERROR_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace leveralign {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on a numeric argument (out-of-range angle, dt <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-contiguous or out-of-order sample timestamps, or a data dropout.
class TimeError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure. `key()` names the offending key
/// (empty when the failure is not tied to one) and `line()` the 1-based line,
/// or 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// The observation pairs do not determine a unique attitude. `axis()` is the
/// direction (in the body-at-start frame) about which rotation is unobservable.
class DegenerateGeometryError : public Error {
 public:
  DegenerateGeometryError(const std::string& what, const Eigen::Vector3d& axis)
      : Error(what), axis_(axis) {}
  const Eigen::Vector3d& axis() const { return axis_; }

 private:
  Eigen::Vector3d axis_;
};

}  // namespace leveralign

#endif  // LEVERALIGN_ERROR_HPP
