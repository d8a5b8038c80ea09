#pragma once

#include <stdexcept>
#include <string>

namespace fscap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied something malformed (bad alphabet sizes, d <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The (S,Q) chain has more than one closed communicating class.
class MultichainError : public Error {
 public:
  explicit MultichainError(std::size_t closed_classes)
      : Error("multichain: " + std::to_string(closed_classes) + " closed classes"),
        closed_classes_(closed_classes) {}
  std::size_t closed_classes() const noexcept { return closed_classes_; }

 private:
  std::size_t closed_classes_;
};

/// The unique closed class of the (S,Q) chain is periodic.
class PeriodicError : public Error {
 public:
  explicit PeriodicError(std::size_t period)
      : Error("periodic: closed class has period " + std::to_string(period)), period_(period) {}
  std::size_t period() const noexcept { return period_; }

 private:
  std::size_t period_;
};

/// An iterative method stopped before meeting its tolerance.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace fscap
