#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "freqinv/common.hpp"
#include "freqinv/geometry.hpp"
#include "freqinv/krylov.hpp"

namespace freqinv {

enum class BcKind { Dirichlet, Robin };

/// Boundary condition on one face tag. Robin reads
///     d_n w + coefficient * w = values      (outward normal n),
/// so homogeneous Neumann is Robin with zero coefficient and no values.
/// `values` is a full-grid field read at the face's nodes; empty means zero.
struct FaceCondition {
  BcKind kind = BcKind::Dirichlet;
  cplx coefficient{0.0, 0.0};
  ComplexField values;

  static FaceCondition dirichlet(ComplexField mu) {
    return {BcKind::Dirichlet, {}, std::move(mu)};
  }
  static FaceCondition robin(cplx alpha, ComplexField s = {}) {
    return {BcKind::Robin, alpha, std::move(s)};
  }
  static FaceCondition neumann() { return {BcKind::Robin, {}, {}}; }
};

/// Delta w - drift . grad w + reaction * w = rhs on the grid, with one
/// condition per face tag. Empty drift/reaction/rhs fields mean zero.
///
/// A node touching any Dirichlet face is a Dirichlet node. With
/// `compact_reaction` the zeroth-order and source terms are discretized as
/// (1 + h^2/12 Delta_h)(reaction * w - rhs), which removes the leading
/// dispersion error of the 7-point Helmholtz operator for axis-aligned waves.
struct EllipticProblem {
  Grid3 grid;
  ComplexVectorField drift;
  ComplexField reaction;
  ComplexField rhs;
  std::array<FaceCondition, 3> faces;  // indexed by Face
  bool compact_reaction = false;

  explicit EllipticProblem(const Grid3& g) : grid(g) {}

  FaceCondition& face(Face f) { return faces[static_cast<std::size_t>(f)]; }
  const FaceCondition& face(Face f) const {
    return faces[static_cast<std::size_t>(f)];
  }

  /// Dirichlet data mu on the whole boundary.
  static EllipticProblem dirichlet(const Grid3& g, const ComplexField& mu);
};

/// The assembled linear system over the non-Dirichlet nodes.
struct DiscreteSystem {
  Eigen::SparseMatrix<cplx> matrix;
  Eigen::VectorXcd rhs;
  std::vector<std::int64_t> unknown_of_node;  // -1 at Dirichlet nodes
  std::vector<std::size_t> node_of_unknown;
  ComplexField dirichlet_values;  // full grid, zero away from Dirichlet nodes

  /// Scatter unknowns back into a full-grid field.
  ComplexField expand(const Eigen::VectorXcd& x) const;
  /// Gather the unknown entries of a full-grid field.
  Eigen::VectorXcd restrict_to_unknowns(const ComplexField& w) const;
};

DiscreteSystem discretize(const EllipticProblem& problem);

enum class SolveMethod { Auto, Direct, Iterative };

struct SolverOptions {
  double tolerance = 1e-8;
  SolveMethod method = SolveMethod::Auto;
  std::size_t direct_limit = 60000;
  int restart = 50;
  int max_iterations = 10000;
  /// Replaces the incomplete-LU preconditioner of the iterative path. Acts on
  /// vectors over the unknowns of the assembled system.
  LinearOperator preconditioner;
};

struct EllipticSolution {
  ComplexField w;
  LinearSolveReport report;
};

/// Solves the problem; throws SolverError (carrying the report) when the
/// relative residual exceeds the tolerance.
EllipticSolution solve(const EllipticProblem& problem,
                       const SolverOptions& options = {});

/// Solves an assembled system; same contract as solve().
EllipticSolution solve_system(const DiscreteSystem& sys,
                              const SolverOptions& options = {});

/// Relative l2 residual of a full-grid field against the assembled system.
double relative_residual(const DiscreteSystem& sys, const ComplexField& w);

}  // namespace freqinv
