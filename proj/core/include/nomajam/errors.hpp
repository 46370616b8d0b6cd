#pragma once

#include <stdexcept>
#include <string>

namespace nomajam {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario text, unknown key, or a violated scenario invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A function was called outside its documented domain (e.g. n_b = 0).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// M/D/1 queue with utilization >= 1; the mean delay is unbounded.
class QueueUnstableError : public Error {
 public:
  QueueUnstableError(const std::string& what, double utilization)
      : Error(what), utilization_(utilization) {}
  double utilization() const noexcept { return utilization_; }

 private:
  double utilization_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Root finder could not bracket the requested target.
class BracketError : public Error {
 public:
  using Error::Error;
};

}  // namespace nomajam
