#pragma once

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>

namespace relkac {

using Complex = std::complex<double>;
// Points in R^d, d <= 3, stored inline.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A quadrature or iterative procedure failed to reach its tolerance.
class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Any numerical inconsistency detected at run time (negative spectrum etc).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MassDim {
  double m = 1.0;
  int d = 1;

  void validate() const {
    if (!(m >= 0.0)) throw DomainError("mass must be >= 0");
    if (d < 1) throw DomainError("dimension must be >= 1");
  }
};

inline Point zero_point(int d) { return Point::Zero(d); }

}  // namespace relkac
