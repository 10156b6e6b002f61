#pragma once

#include <string>
#include <vector>

#include "freqinv/elliptic.hpp"
#include "freqinv/geometry.hpp"

namespace freqinv {

/// Relative l2 distance between the forward solution for c = 1 and the
/// incident plane wave on G = (-half_width, half_width)^3.
double plane_wave_error(double half_width, double step, double k,
                        const SolverOptions& options = {});

struct OrderStudy {
  double coarse_error = 0.0;
  double fine_error = 0.0;
  double ratio() const { return coarse_error / fine_error; }
};

/// Max-norm error of the Dirichlet drift problem with the manufactured
/// solution exp(0.3 x1 + 0.1 i x3) and drift (0, 0, 0.2 i) on (-1, 1)^3,
/// at `coarse_nodes` per axis and at the halved step.
OrderStudy manufactured_order(int coarse_nodes, const SolverOptions& options);

/// Unpreconditioned GMRES options: the answer quality then follows the
/// requested tolerance directly.
SolverOptions plain_krylov(double tolerance);

/// Relative l2 disagreement on Omega between the volume integral solution and
/// the forward PDE solution for c = 1 + contrast inside a ball of `radius`
/// at the origin. G extends Omega by `pad` on every side.
double ls_pde_disagreement(double omega_half_width, double pad, double step,
                           double k, double contrast, double radius);

/// ||u(eps) - u0 - eps K[u0]|| at eps and eps / 2, for a unit ball contrast.
struct BornStudy {
  double remainder_eps = 0.0;
  double remainder_half = 0.0;
  double ratio() const { return remainder_eps / remainder_half; }
};
BornStudy born_scaling(double half_width, double step, double k, double eps,
                       double radius);

/// Max difference between the GMRES solution of the volume integral equation
/// and a dense LU solve on a small grid.
double ls_dense_difference(double half_width, double step, double k);

/// The ball self-cell oracle: (K 1)(0) for the indicator of a ball of radius
/// a, at three steps, against e^{-ika}(1 + ika) - 1. Returns the relative
/// error of the Richardson extrapolation of the two finest steps.
struct BallStudy {
  std::vector<double> steps;
  std::vector<double> relative_errors;
  double extrapolated_error = 0.0;
};
BallStudy ball_oracle(double k, double a, const std::vector<double>& steps);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct VerifyOptions {
  bool full = false;
  /// Solver tolerance for the manufactured-solution order check.
  double tolerance = 1e-8;
};

std::vector<CheckResult> run_verify(const VerifyOptions& options);

}  // namespace freqinv
