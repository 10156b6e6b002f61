#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace freqinv {

using cplx = std::complex<double>;
using Point = std::array<double, 3>;

/// Scalar values on grid nodes, node-index order (x1 fastest, then x2, x3).
using ComplexField = Eigen::VectorXcd;
using RealField = Eigen::VectorXd;

/// Complex 3-vector per node, stored as three component fields.
struct ComplexVectorField {
  std::array<ComplexField, 3> comp;

  ComplexVectorField() = default;
  explicit ComplexVectorField(Eigen::Index n) {
    for (auto& c : comp) c = ComplexField::Zero(n);
  }
  Eigen::Index size() const { return comp[0].size(); }
  ComplexField& operator[](int a) { return comp[static_cast<std::size_t>(a)]; }
  const ComplexField& operator[](int a) const {
    return comp[static_cast<std::size_t>(a)];
  }
};

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Errors. Every failure surfaced by the library derives from Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry, scenario values or mismatched inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A field vanished where a logarithmic derivative or quotient is needed.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace freqinv
