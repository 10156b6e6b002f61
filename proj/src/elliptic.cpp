#include "freqinv/elliptic.hpp"

#include <memory>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>

namespace freqinv {

namespace {

cplx value_or_zero(const ComplexField& f, std::size_t idx) {
  return f.size() == 0 ? cplx{} : f[static_cast<Eigen::Index>(idx)];
}

// Face tag governing the ghost node across the boundary in direction
// (axis, side).
Face ghost_face(int axis, int side) {
  if (axis == 2) return side < 0 ? Face::Bottom : Face::Top;
  return Face::Lateral;
}

void check_size(const char* what, Eigen::Index got, std::size_t want) {
  if (got != 0 && static_cast<std::size_t>(got) != want) {
    std::ostringstream os;
    os << "elliptic: " << what << " has " << got << " entries, grid has "
       << want;
    throw ConfigError(os.str());
  }
}

}  // namespace

EllipticProblem EllipticProblem::dirichlet(const Grid3& g,
                                           const ComplexField& mu) {
  EllipticProblem p(g);
  for (auto& f : p.faces) f = FaceCondition::dirichlet(mu);
  return p;
}

ComplexField DiscreteSystem::expand(const Eigen::VectorXcd& x) const {
  ComplexField w = dirichlet_values;
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    w[static_cast<Eigen::Index>(node_of_unknown[u])] =
        x[static_cast<Eigen::Index>(u)];
  return w;
}

Eigen::VectorXcd DiscreteSystem::restrict_to_unknowns(
    const ComplexField& w) const {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(node_of_unknown.size()));
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    x[static_cast<Eigen::Index>(u)] =
        w[static_cast<Eigen::Index>(node_of_unknown[u])];
  return x;
}

DiscreteSystem discretize(const EllipticProblem& p) {
  const Grid3& g = p.grid;
  const std::size_t nn = g.size();
  const int n = g.nodes_per_axis();
  const double h = g.step();
  const double ih2 = 1.0 / (h * h);

  for (int a = 0; a < 3; ++a) check_size("drift", p.drift.comp[a].size(), nn);
  check_size("reaction", p.reaction.size(), nn);
  check_size("rhs", p.rhs.size(), nn);
  for (const auto& f : p.faces) check_size("face values", f.values.size(), nn);

  DiscreteSystem sys;
  sys.unknown_of_node.assign(nn, -1);
  sys.dirichlet_values = ComplexField::Zero(static_cast<Eigen::Index>(nn));

  // Dirichlet classification and numbering.
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, l);
        auto own = face_of(g, i, j, l);
        bool dirichlet = false;
        const FaceCondition* source = nullptr;
        if (own) {
          if (p.face(*own).kind == BcKind::Dirichlet) {
            dirichlet = true;
            source = &p.face(*own);
          } else {
            const bool lateral = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            const bool bottom = l == 0, top = l == n - 1;
            for (Face f : {Face::Bottom, Face::Top, Face::Lateral}) {
              const bool touches = (f == Face::Bottom && bottom) ||
                                   (f == Face::Top && top) ||
                                   (f == Face::Lateral && lateral);
              if (touches && p.face(f).kind == BcKind::Dirichlet) {
                dirichlet = true;
                source = &p.face(f);
                break;
              }
            }
          }
        }
        if (dirichlet) {
          sys.dirichlet_values[static_cast<Eigen::Index>(idx)] =
              value_or_zero(source->values, idx);
        } else {
          sys.unknown_of_node[idx] =
              static_cast<std::int64_t>(sys.node_of_unknown.size());
          sys.node_of_unknown.push_back(idx);
        }
      }

  const auto nu = static_cast<Eigen::Index>(sys.node_of_unknown.size());
  sys.rhs = Eigen::VectorXcd::Zero(nu);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(nu) * (p.compact_reaction ? 13 : 7));

  const bool has_drift = p.drift.comp[0].size() != 0;
  const bool has_reaction = p.reaction.size() != 0;
  const bool has_rhs = p.rhs.size() != 0;

  for (Eigen::Index row = 0; row < nu; ++row) {
    const std::size_t idx = sys.node_of_unknown[static_cast<std::size_t>(row)];
    const auto [i, j, l] = g.ijk(idx);
    const std::array<int, 3> c{i, j, l};

    auto add = [&](std::size_t node, cplx w) {
      const auto col = sys.unknown_of_node[node];
      if (col >= 0)
        trip.emplace_back(row, static_cast<Eigen::Index>(col), w);
      else
        sys.rhs[row] -= w * sys.dirichlet_values[static_cast<Eigen::Index>(node)];
    };

    cplx diag = -6.0 * ih2;
    cplx rhs = 0.0;
    const cplx r_p = has_reaction ? p.reaction[static_cast<Eigen::Index>(idx)]
                                  : cplx{};
    const cplx f_p = has_rhs ? p.rhs[static_cast<Eigen::Index>(idx)] : cplx{};

    for (int a = 0; a < 3; ++a) {
      const cplx b_a =
          has_drift ? p.drift[a][static_cast<Eigen::Index>(idx)] : cplx{};
      for (int d : {-1, 1}) {
        std::array<int, 3> q = c;
        q[static_cast<std::size_t>(a)] += d;
        std::array<int, 3> mirror = c;
        mirror[static_cast<std::size_t>(a)] -= d;
        const cplx w_nb = ih2 - b_a * (static_cast<double>(d) / (2.0 * h));
        const bool inside = g.contains(q[0], q[1], q[2]);
        // Neighbor used by the compact correction: reflect across the face.
        const std::size_t qc = inside ? g.index(q[0], q[1], q[2])
                                      : g.index(mirror[0], mirror[1], mirror[2]);
        if (inside) {
          add(qc, w_nb);
        } else {
          // Ghost node: u_g = u_mirror + 2h (s - alpha u_p).
          const FaceCondition& fc = p.face(ghost_face(a, d));
          add(qc, w_nb);
          diag -= w_nb * 2.0 * h * fc.coefficient;
          rhs -= w_nb * 2.0 * h * value_or_zero(fc.values, idx);
        }
        if (p.compact_reaction) {
          if (has_reaction)
            add(qc, p.reaction[static_cast<Eigen::Index>(qc)] / 12.0);
          if (has_rhs) rhs += p.rhs[static_cast<Eigen::Index>(qc)] / 12.0;
        }
      }
    }
    if (p.compact_reaction) {
      diag += 0.5 * r_p;
      rhs += 0.5 * f_p;
    } else {
      diag += r_p;
      rhs += f_p;
    }
    trip.emplace_back(row, row, diag);
    sys.rhs[row] += rhs;
  }

  sys.matrix.resize(nu, nu);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

double relative_residual(const DiscreteSystem& sys, const ComplexField& w) {
  const Eigen::VectorXcd x = sys.restrict_to_unknowns(w);
  const double bn = sys.rhs.norm();
  const double rn = (sys.rhs - sys.matrix * x).norm();
  return bn > 0.0 ? rn / bn : rn;
}

EllipticSolution solve_system(const DiscreteSystem& sys,
                              const SolverOptions& opt) {
  if (!(opt.tolerance > 0.0 && opt.tolerance < 1.0)) {
    std::ostringstream os;
    os << "elliptic: tolerance " << opt.tolerance << " outside (0, 1)";
    throw ConfigError(os.str());
  }
  EllipticSolution sol;
  const auto nu = sys.matrix.rows();
  if (nu == 0) {
    sol.w = sys.dirichlet_values;
    sol.report.converged = true;
    return sol;
  }

  const bool direct =
      opt.method == SolveMethod::Direct ||
      (opt.method == SolveMethod::Auto &&
       static_cast<std::size_t>(nu) <= opt.direct_limit);

  Eigen::VectorXcd x;
  if (direct) {
    Eigen::UmfPackLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) {
      LinearSolveReport rep;
      rep.residual_norm = 1.0;
      throw SolverError("elliptic: sparse LU factorization failed", rep);
    }
    x = lu.solve(sys.rhs);
    sol.report.iterations = 1;
    const double bn = sys.rhs.norm();
    sol.report.residual_norm =
        bn > 0.0 ? (sys.rhs - sys.matrix * x).norm() / bn : 0.0;
  } else {
    LinearOperator precond = opt.preconditioner;
    auto ilu = std::make_shared<Eigen::IncompleteLUT<cplx>>();
    if (!precond) {
      ilu->setDroptol(1e-4);
      ilu->setFillfactor(4);
      ilu->compute(sys.matrix);
      if (ilu->info() != Eigen::Success) {
        LinearSolveReport rep;
        rep.residual_norm = 1.0;
        throw SolverError("elliptic: incomplete LU failed", rep);
      }
      precond = [ilu](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out = ilu->solve(in);
      };
    }
    GmresOptions go;
    go.restart = opt.restart;
    go.max_iterations = opt.max_iterations;
    go.tolerance = opt.tolerance;
    x = Eigen::VectorXcd::Zero(nu);
    sol.report = gmres(
        [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
          out = sys.matrix * in;
        },
        sys.rhs, x, go, precond);
  }
  sol.report.converged = sol.report.residual_norm <= opt.tolerance;
  if (!sol.report.converged) {
    std::ostringstream os;
    os << "elliptic: solve did not converge (residual "
       << sol.report.residual_norm << " after " << sol.report.iterations
       << " iterations)";
    throw SolverError(os.str(), sol.report);
  }
  sol.w = sys.expand(x);
  return sol;
}

EllipticSolution solve(const EllipticProblem& problem,
                       const SolverOptions& options) {
  return solve_system(discretize(problem), options);
}

}  // namespace freqinv
