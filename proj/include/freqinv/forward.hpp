#pragma once

#include <span>
#include <vector>

#include "freqinv/common.hpp"
#include "freqinv/elliptic.hpp"
#include "freqinv/geometry.hpp"

namespace freqinv {

/// Cube-shaped inclusion with c = contrast inside.
struct Inclusion {
  Point center{};
  double side = 0.0;
  double contrast = 1.0;

  bool operator==(const Inclusion&) const = default;
};

/// Dielectric coefficient c = 1 + beta on the nodes of the truncation grid.
struct MediumField {
  Grid3 grid;
  RealField c;
};

MediumField background_medium(const Grid3& g);

/// Nodes take 1 + (contrast - 1) * (fraction of their dual cell covered by
/// the inclusion), so the sampled medium carries the inclusion volume
/// exactly. Overlapping inclusions take the larger value.
MediumField build_medium(const Grid3& g, std::span<const Inclusion> inclusions);

/// Throws ConfigError unless c >= 1 everywhere and c == 1 outside the open
/// cube of half-width `support_half_width`.
void validate_medium(const MediumField& m, double support_half_width);

struct TotalField {
  Grid3 grid;
  ComplexField u;
  double k = 0.0;
  LinearSolveReport report;
};

/// Incident plane wave exp(-i k x3) sampled on a grid.
ComplexField plane_wave(const Grid3& g, double k);

/// Assembles the truncated-domain Helmholtz problem at wavenumber k:
/// Delta u + k^2 c u = 0, impedance conditions on the x3 faces that absorb
/// the scattered field (inhomogeneous on the bottom so the incident wave
/// passes through), homogeneous Neumann on the lateral faces.
EllipticProblem forward_problem(const MediumField& medium, double k);

/// Exact inverse of the forward operator for the background medium c = 1,
/// applied by expanding the lateral directions in eigenvectors of the 1D
/// Neumann second difference and solving one tridiagonal system along x3 per
/// lateral mode. Serves as the preconditioner of the iterative forward solve.
class BackgroundPreconditioner {
 public:
  BackgroundPreconditioner(const Grid3& g, double k);
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

 private:
  int n_;
  Eigen::MatrixXcd modes_;      // V(i, m) = cos(pi m i / (n - 1))
  Eigen::MatrixXcd modes_inv_;
  // Thomas factors per lateral mode, layout [mode * n + l].
  std::vector<cplx> upper_;
  std::vector<cplx> inv_pivot_;
  std::vector<cplx> lower_;
};

/// GMRES preconditioned with BackgroundPreconditioner unless the options ask
/// for a direct solve or carry their own preconditioner. The preconditioner is
/// exact for c = 1, so a few iterations suffice for compact inclusions.
TotalField solve_forward(const MediumField& medium, double k,
                         const SolverOptions& options = {});

/// u and grad u at the boundary nodes of a nested inner grid.
struct BoundaryTrace {
  Grid3 grid;                      // the inner (Omega) grid
  std::vector<std::size_t> nodes;  // boundary node indices, increasing
  Eigen::VectorXcd u;
  std::array<Eigen::VectorXcd, 3> grad;
  double k = 0.0;
};

/// Position of `inner` inside `outer`, in outer-grid steps along each axis.
/// Inner nodes either coincide with outer nodes (integer offset) or sit at
/// outer cell centres (half-integer offset).
struct GridEmbedding {
  int half_steps = 0;  // twice the offset
  bool aligned() const { return half_steps % 2 == 0; }
  double offset() const { return 0.5 * half_steps; }
};

/// Throws ConfigError unless the grids share the step and the offset is a
/// non-negative multiple of half a step.
GridEmbedding embed(const Grid3& outer, const Grid3& inner);

/// Inner-grid values of an outer-grid field: copied at coinciding nodes,
/// averaged over the 8 surrounding outer nodes at cell centres.
ComplexField restrict_field(const Grid3& outer, const ComplexField& f,
                            const Grid3& inner);

/// Samples u and grad u on the boundary of `omega`, which must lie strictly
/// inside the field's grid. Coinciding nodes use centered differences over
/// two steps; cell-centre nodes average the four one-step differences that
/// straddle them.
BoundaryTrace trace_on_omega(const TotalField& field, const Grid3& omega);

}  // namespace freqinv
