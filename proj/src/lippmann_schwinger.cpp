#include "freqinv/lippmann_schwinger.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace freqinv {

cplx helmholtz_kernel(double k, double r) {
  return std::exp(-I * (k * r)) / (4.0 * kPi * r);
}

cplx ball_kernel_integral(double k, double a) {
  const cplx ika = I * (k * a);
  return (std::exp(-ika) * (1.0 + ika) - 1.0) / (k * k);
}

double equivalent_ball_radius(double step) {
  return step * std::cbrt(3.0 / (4.0 * kPi));
}

std::vector<std::size_t> ContrastField::support() const {
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values[i] != cplx{}) s.push_back(static_cast<std::size_t>(i));
  return s;
}

ContrastField make_contrast(const Grid3& g, const ComplexField& rho,
                            const CutoffField& cutoff) {
  if (static_cast<std::size_t>(rho.size()) != g.size() ||
      cutoff.values.size() != rho.size())
    throw ConfigError("contrast: field sizes do not match the grid");
  ContrastField c{g, rho};
  for (Eigen::Index i = 0; i < rho.size(); ++i) c.values[i] *= cutoff.values[i];
  return c;
}

VolumePotential::VolumePotential(const Grid3& g, double k) : grid_(g), k_(k) {
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "volume potential: wavenumber must be positive, got " << k;
    throw ConfigError(os.str());
  }
  const int n = g.nodes_per_axis();
  const double h = g.step();
  const double w = h * h * h;
  table_.resize(g.size());
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r = h * std::sqrt(static_cast<double>(i * i + j * j + l * l));
        table_[g.index(i, j, l)] =
            r == 0.0 ? ball_kernel_integral(k, equivalent_ball_radius(h))
                     : w * helmholtz_kernel(k, r);
      }
}

cplx VolumePotential::weight(int di, int dj, int dl) const {
  return table_[grid_.index(std::abs(di), std::abs(dj), std::abs(dl))];
}

ComplexField VolumePotential::apply(const ContrastField& contrast,
                                    const ComplexField& u) const {
  if (!(contrast.grid == grid_) ||
      static_cast<std::size_t>(u.size()) != grid_.size())
    throw ConfigError("volume potential: operand grid mismatch");
  const auto support = contrast.support();
  std::vector<std::array<int, 3>> src_ijk;
  std::vector<cplx> src_val;
  src_ijk.reserve(support.size());
  src_val.reserve(support.size());
  for (std::size_t s : support) {
    src_ijk.push_back(grid_.ijk(s));
    src_val.push_back(contrast.values[static_cast<Eigen::Index>(s)] *
                      u[static_cast<Eigen::Index>(s)]);
  }
  const double k2 = k_ * k_;
  ComplexField out(u.size());
  for (std::size_t t = 0; t < grid_.size(); ++t) {
    const auto [i, j, l] = grid_.ijk(t);
    cplx acc = 0.0;
    for (std::size_t s = 0; s < src_ijk.size(); ++s) {
      const auto& q = src_ijk[s];
      acc += weight(i - q[0], j - q[1], l - q[2]) * src_val[s];
    }
    out[static_cast<Eigen::Index>(t)] = k2 * acc;
  }
  return out;
}

ComplexField apply_K(const ContrastField& contrast, const ComplexField& u,
                     double k) {
  return VolumePotential(contrast.grid, k).apply(contrast, u);
}

LsSolution solve_ls(const ContrastField& contrast, double k,
                    const LsOptions& options) {
  const Grid3& g = contrast.grid;
  VolumePotential K(g, k);
  ComplexField u0(static_cast<Eigen::Index>(g.size()));
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    u0[static_cast<Eigen::Index>(idx)] = std::exp(-I * (k * g.point(idx)[2]));

  LsSolution sol;
  sol.u = u0;
  GmresOptions go;
  go.tolerance = options.tolerance;
  go.restart = options.restart;
  go.max_iterations = options.max_iterations;
  sol.report = gmres(
      [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out = in - K.apply(contrast, in);
      },
      u0, sol.u, go);
  if (!sol.report.converged) {
    std::ostringstream os;
    os << "lippmann-schwinger: GMRES stagnated at relative residual "
       << sol.report.residual_norm << " after " << sol.report.iterations
       << " iterations";
    throw SolverError(os.str(), sol.report);
  }
  return sol;
}

namespace {

// Calls f(source point, contrast * u) for each supported source node.
template <class F>
void for_each_source(const ContrastField& c, const ComplexField& u, F&& f) {
  for (std::size_t s : c.support())
    f(s, c.grid.point(s),
      c.values[static_cast<Eigen::Index>(s)] * u[static_cast<Eigen::Index>(s)]);
}

}  // namespace

cplx evaluate_field(const ContrastField& contrast, const ComplexField& u,
                    double k, const Point& x) {
  const double h = contrast.grid.step();
  const double w = h * h * h;
  cplx acc = 0.0;
  for_each_source(contrast, u, [&](std::size_t, const Point& y, cplx src) {
    const double r =
        std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) +
                  (x[2] - y[2]) * (x[2] - y[2]));
    if (r < 1e-9 * h)
      acc += ball_kernel_integral(k, equivalent_ball_radius(h)) * src;
    else
      acc += w * helmholtz_kernel(k, r) * src;
  });
  return std::exp(-I * (k * x[2])) + k * k * acc;
}

std::array<cplx, 3> evaluate_gradient(const ContrastField& contrast,
                                      const ComplexField& u, double k,
                                      const Point& x) {
  const double h = contrast.grid.step();
  const double w = h * h * h;
  std::array<cplx, 3> acc{};
  for_each_source(contrast, u, [&](std::size_t, const Point& y, cplx src) {
    const std::array<double, 3> d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
    const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (r < 1e-9 * h) return;
    // grad_x Phi = Phi (-i k - 1/r) (x - y) / r
    const cplx radial = helmholtz_kernel(k, r) * (-I * k - 1.0 / r) / r;
    for (std::size_t a = 0; a < 3; ++a) acc[a] += w * radial * d[a] * src;
  });
  std::array<cplx, 3> grad{k * k * acc[0], k * k * acc[1], k * k * acc[2]};
  grad[2] += -I * k * std::exp(-I * (k * x[2]));
  return grad;
}

}  // namespace freqinv
