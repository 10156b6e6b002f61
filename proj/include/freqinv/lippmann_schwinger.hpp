#pragma once

#include <array>
#include <vector>

#include "freqinv/common.hpp"
#include "freqinv/geometry.hpp"
#include "freqinv/krylov.hpp"

namespace freqinv {

/// Outgoing free-space kernel exp(-i k r) / (4 pi r), r = |x - y| > 0.
cplx helmholtz_kernel(double k, double r);

/// Integral of the kernel over a ball of radius a around its singularity:
/// (exp(-i k a) (1 + i k a) - 1) / k^2.
cplx ball_kernel_integral(double k, double a);

/// Radius of the ball with the volume of one grid cell, (4/3) pi a^3 = h^3.
double equivalent_ball_radius(double step);

/// Complex contrast on the inner grid, vanishing on the boundary.
struct ContrastField {
  Grid3 grid;
  ComplexField values;

  /// Nodes carrying a nonzero contrast, increasing.
  std::vector<std::size_t> support() const;
};

/// Multiplies `rho` by the cutoff so the product vanishes near the boundary.
ContrastField make_contrast(const Grid3& g, const ComplexField& rho,
                            const CutoffField& cutoff);

/// Midpoint-rule volume potential operator
///     (K u)(x_i) = k^2 sum_j h^3 Phi(x_i, y_j) rho(y_j) u(y_j),
/// with the singular self-cell replaced by the equal-volume ball integral.
/// The kernel only depends on the index offset, so it is tabulated once.
class VolumePotential {
 public:
  VolumePotential(const Grid3& g, double k);

  const Grid3& grid() const { return grid_; }
  double wavenumber() const { return k_; }

  /// K applied to u for the given contrast. Summation order per target is
  /// fixed (increasing source index).
  ComplexField apply(const ContrastField& contrast, const ComplexField& u) const;

  /// Kernel weight h^3 Phi for a node offset, self-cell corrected at 0.
  cplx weight(int di, int dj, int dl) const;

 private:
  Grid3 grid_;
  double k_;
  std::vector<cplx> table_;  // indexed by |di| + n (|dj| + n |dl|)
};

ComplexField apply_K(const ContrastField& contrast, const ComplexField& u,
                     double k);

struct LsOptions {
  double tolerance = 1e-8;
  int restart = 50;
  int max_iterations = 2000;
};

struct LsSolution {
  ComplexField u;
  LinearSolveReport report;
};

/// Solves u = exp(-i k x3) + K u on the grid by GMRES on (I - K).
/// Throws SolverError on stagnation.
LsSolution solve_ls(const ContrastField& contrast, double k,
                    const LsOptions& options = {});

/// The representation u0(x) + (K u)(x) at an arbitrary point.
cplx evaluate_field(const ContrastField& contrast, const ComplexField& u,
                    double k, const Point& x);

/// Gradient of the representation at an arbitrary point. A source cell
/// centered at x contributes nothing (the ball integral of grad Phi vanishes).
std::array<cplx, 3> evaluate_gradient(const ContrastField& contrast,
                                      const ComplexField& u, double k,
                                      const Point& x);

}  // namespace freqinv
