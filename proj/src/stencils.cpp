#include "freqinv/stencils.hpp"

#include <algorithm>
#include <cmath>

namespace freqinv {

ComplexField partial(const Grid3& g, const ComplexField& f, int axis) {
  const int n = g.nodes_per_axis();
  const double h = g.step();
  ComplexField out(f.size());
  const std::size_t stride = axis == 0   ? 1
                             : axis == 1 ? static_cast<std::size_t>(n)
                                         : static_cast<std::size_t>(n) * n;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, l);
        const int c = axis == 0 ? i : axis == 1 ? j : l;
        auto at = [&](long off) {
          return f[static_cast<Eigen::Index>(static_cast<long>(idx) +
                                             off * static_cast<long>(stride))];
        };
        cplx d;
        if (n < 3) {
          d = n == 2 ? (c == 0 ? at(1) - at(0) : at(0) - at(-1)) / h : cplx{};
        } else if (c == 0) {
          d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        } else if (c == n - 1) {
          d = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
        } else {
          d = (at(1) - at(-1)) / (2.0 * h);
        }
        out[static_cast<Eigen::Index>(idx)] = d;
      }
  return out;
}

ComplexVectorField gradient(const Grid3& g, const ComplexField& f) {
  ComplexVectorField v;
  for (int a = 0; a < 3; ++a) v[a] = partial(g, f, a);
  return v;
}

ComplexField divergence(const Grid3& g, const ComplexVectorField& v) {
  return partial(g, v[0], 0) + partial(g, v[1], 1) + partial(g, v[2], 2);
}

ComplexField dot(const ComplexVectorField& v, const ComplexVectorField& w) {
  return (v[0].array() * w[0].array() + v[1].array() * w[1].array() +
          v[2].array() * w[2].array())
      .matrix();
}

double max_curl(const Grid3& g, const ComplexVectorField& v) {
  const ComplexField c0 = partial(g, v[2], 1) - partial(g, v[1], 2);
  const ComplexField c1 = partial(g, v[0], 2) - partial(g, v[2], 0);
  const ComplexField c2 = partial(g, v[1], 0) - partial(g, v[0], 1);
  double m = 0.0;
  for (Eigen::Index k = 0; k < c0.size(); ++k)
    m = std::max(m, std::sqrt(std::norm(c0[k]) + std::norm(c1[k]) +
                              std::norm(c2[k])));
  return m;
}

}  // namespace freqinv
