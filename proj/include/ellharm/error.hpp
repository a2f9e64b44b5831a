#pragma once

#include <stdexcept>
#include <string>

namespace ellharm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument to a constructor or operation (bad semi-axes, bad order...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Coordinate transform hit a degenerate configuration or failed to bracket a root.
class CoordinateError : public Error {
public:
    using Error::Error;
};

/// A quadrature could not be carried out (non-finite integrand, resource guard).
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double abscissa = 0.0)
        : Error(what), abscissa_(abscissa) {}

    double abscissa() const { return abscissa_; }

private:
    double abscissa_;
};

/// Eigen-solver or other iterative numerical failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace ellharm
