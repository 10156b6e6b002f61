#pragma once

#include "freqinv/common.hpp"
#include "freqinv/geometry.hpp"

namespace freqinv {

/// Partial derivative along `axis`: centered in the interior, second-order
/// one-sided on the two extreme planes.
ComplexField partial(const Grid3& g, const ComplexField& f, int axis);

ComplexVectorField gradient(const Grid3& g, const ComplexField& f);

ComplexField divergence(const Grid3& g, const ComplexVectorField& v);

/// Pointwise v . w (no conjugation).
ComplexField dot(const ComplexVectorField& v, const ComplexVectorField& w);

/// Discrete curl magnitude max over nodes, for gradient-consistency checks.
double max_curl(const Grid3& g, const ComplexVectorField& v);

}  // namespace freqinv
