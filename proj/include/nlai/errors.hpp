#pragma once

#include <stdexcept>
#include <string>

namespace nlai {

/// Caller supplied something outside an operation's domain: a non-finite
/// angle, an atom number of zero, an unknown configuration key, ...
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The inputs were valid but the computation cannot produce a meaningful
/// number (vanishing mean spin, zero phase slope, quadrature failure).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateStateError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
  public:
    QuadratureError(const std::string &what, double achieved, double requested)
        : NumericalError(what), achieved_(achieved), requested_(requested) {}

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

  private:
    double achieved_;
    double requested_;
};

} // namespace nlai
