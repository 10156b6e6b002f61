#include "freqinv/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "freqinv/lippmann_schwinger.hpp"
#include "freqinv/stencils.hpp"

namespace freqinv {

namespace {

ComplexVectorField scaled(const ComplexVectorField& v, cplx s) {
  ComplexVectorField out = v;
  for (int a = 0; a < 3; ++a) out[a] *= s;
  return out;
}

TailGradient log_gradient(const Grid3& g, const ComplexField& u) {
  TailGradient t{g, gradient(g, u), {}};
  for (int a = 0; a < 3; ++a) t.grad[a] = t.grad[a].cwiseQuotient(u);
  t.lap = divergence(g, t.grad);
  return t;
}

std::string step_context(int n, int i, const std::exception& e) {
  std::ostringstream os;
  os << "inversion step (n = " << n << ", i = " << i << "): " << e.what();
  return os.str();
}

}  // namespace

TailGradient init_tail(const BoundaryTrace& trace, const SolverOptions& options) {
  const Grid3& g = trace.grid;
  const auto nn = static_cast<Eigen::Index>(g.size());
  TailGradient t{g, ComplexVectorField(nn), {}};
  for (int a = 0; a < 3; ++a) {
    ComplexField mu = ComplexField::Zero(nn);
    for (std::size_t b = 0; b < trace.nodes.size(); ++b) {
      const auto bi = static_cast<Eigen::Index>(b);
      if (std::abs(trace.u[bi]) <= 1e-12) {
        std::ostringstream os;
        os << "tail initialization: |u| <= 1e-12 at boundary node "
           << trace.nodes[b];
        throw DegenerateDataError(os.str());
      }
      mu[static_cast<Eigen::Index>(trace.nodes[b])] =
          trace.grad[static_cast<std::size_t>(a)][bi] / trace.u[bi];
    }
    t.grad[a] = solve(EllipticProblem::dirichlet(g, mu), options).w;
  }
  t.lap = divergence(g, t.grad);
  return t;
}

QAccumulator::QAccumulator(const Grid3& g)
    : grid_(g),
      zero_(ComplexField::Zero(static_cast<Eigen::Index>(g.size()))),
      sum_(zero_),
      grad_last_(static_cast<Eigen::Index>(g.size())),
      grad_sum_(static_cast<Eigen::Index>(g.size())),
      lap_sum_(zero_) {}

const ComplexField& QAccumulator::q(int j) const {
  if (j == 0) return zero_;
  return q_.at(static_cast<std::size_t>(j - 1));
}

void QAccumulator::push(ComplexField q) {
  sum_ += q;
  grad_last_ = gradient(grid_, q);
  grad_sum_ = gradient(grid_, sum_);
  lap_sum_ = divergence(grid_, grad_sum_);
  q_.push_back(std::move(q));
}

const char* to_string(QCoupling c) {
  switch (c) {
    case QCoupling::Lagged: return "lagged";
    case QCoupling::Inner: return "inner";
    case QCoupling::Implicit: return "implicit";
  }
  return "?";
}

QCoupling q_coupling_from_string(const std::string& s) {
  if (s == "lagged") return QCoupling::Lagged;
  if (s == "inner") return QCoupling::Inner;
  if (s == "implicit") return QCoupling::Implicit;
  throw ConfigError("unknown q coupling '" + s + "' (expected lagged, inner or implicit)");
}

EllipticProblem q_problem(int n, const ComplexField& psi_boundary,
                          const QAccumulator& acc, const TailGradient& tail,
                          const FrequencyLadder& ladder, QCoupling coupling,
                          const ComplexVectorField* grad_inner) {
  if (n < 1 || n > ladder.N) {
    std::ostringstream os;
    os << "q problem: index n = " << n << " outside 1.." << ladder.N;
    throw ConfigError(os.str());
  }
  if (acc.size() != n - 1) {
    std::ostringstream os;
    os << "q problem: accumulator holds " << acc.size() << " terms, expected "
       << n - 1;
    throw ConfigError(os.str());
  }
  const Grid3& g = tail.grid;
  const double h = ladder.h;
  const double A = ladder.A(n);
  const double k_prev = ladder.k(n - 1);

  EllipticProblem p = EllipticProblem::dirichlet(g, psi_boundary);
  const ComplexVectorField h_grad_sum = scaled(acc.grad_sum(), h);
  p.drift = scaled(h_grad_sum, A);
  p.rhs = (2.0 / k_prev) * (tail.lap + dot(tail.grad, tail.grad)) -
          (4.0 / k_prev) * dot(tail.grad, h_grad_sum) -
          (2.0 * h / k_prev) * acc.lap_sum();
  switch (coupling) {
    case QCoupling::Lagged:
      p.rhs -= A * dot(acc.grad_last(), tail.grad);
      break;
    case QCoupling::Inner:
      if (!grad_inner) throw ConfigError("q problem: inner coupling needs grad q_{n,i-1}");
      p.rhs -= A * dot(*grad_inner, tail.grad);
      break;
    case QCoupling::Implicit:
      for (int a = 0; a < 3; ++a) p.drift[a] -= A * tail.grad[a];
      break;
  }
  return p;
}

EllipticSolution solve_q(int n, const ComplexField& psi_boundary,
                         const QAccumulator& acc, const TailGradient& tail,
                         const FrequencyLadder& ladder,
                         const SolverOptions& options, QCoupling coupling,
                         const ComplexVectorField* grad_inner) {
  try {
    return solve(q_problem(n, psi_boundary, acc, tail, ladder, coupling, grad_inner),
                 options);
  } catch (const SolverError& e) {
    std::ostringstream os;
    os << "q solve at n = " << n << ": " << e.what();
    throw SolverError(os.str(), e.report());
  }
}

VField accumulate_v(const ComplexField& q_n, const QAccumulator& acc,
                    const TailGradient& tail, double h) {
  const Grid3& g = tail.grid;
  const ComplexVectorField gq = gradient(g, q_n);
  VField v;
  v.grad = tail.grad;
  for (int a = 0; a < 3; ++a) v.grad[a] -= h * (gq[a] + acc.grad_sum()[a]);
  v.lap = divergence(g, v.grad);
  return v;
}

ComplexField reconstruct_beta(const VField& v, double k) {
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "coefficient reconstruction: k must be positive, got " << k;
    throw ConfigError(os.str());
  }
  ComplexField beta = -(v.lap + dot(v.grad, v.grad)) / (k * k);
  beta.array() -= 1.0;
  return beta;
}

RealField detection_plane(const TailGradient& tail) {
  const Grid3& g = tail.grid;
  const int n = g.nodes_per_axis();
  RealField plane(static_cast<Eigen::Index>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      plane[i + n * j] =
          std::abs(tail.grad[2][static_cast<Eigen::Index>(g.index(i, j, 1))]);
  return plane;
}

std::vector<Cylinder> detect_cylinders(const TailGradient& tail,
                                       const DetectionOptions& options) {
  const Grid3& g = tail.grid;
  const int n = g.nodes_per_axis();
  const RealField plane = detection_plane(tail);
  auto at = [&](int i, int j) { return plane[i + n * j]; };
  std::vector<double> sorted(plane.data(), plane.data() + plane.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  const int ring = std::max(1, static_cast<int>(std::lround(options.ring / g.step())));

  std::vector<Cylinder> peaks;
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) {
      const double v = at(i, j);
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj)
        for (int di = -1; di <= 1; ++di)
          if ((di || dj) && at(i + di, j + dj) > v) {
            is_max = false;
            break;
          }
      if (!is_max) continue;
      double sum = 0.0;
      int count = 0;
      for (int dj = -ring; dj <= ring; ++dj)
        for (int di = -ring; di <= ring; ++di) {
          if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          sum += at(a, b);
          ++count;
        }
      peaks.push_back({g.coord(i), g.coord(j), v, v - sum / count});
    }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Cylinder& a, const Cylinder& b) {
                     return a.prominence > b.prominence;
                   });
  if (peaks.empty() || peaks.front().prominence < options.absolute_floor * median)
    return {};
  const double floor = options.relative_floor * peaks.front().prominence;

  std::vector<Cylinder> kept;
  std::vector<int> members;
  for (const auto& p : peaks) {
    if (p.prominence < floor) break;
    auto clash = std::find_if(kept.begin(), kept.end(), [&](const Cylinder& q) {
      return std::hypot(p.x1 - q.x1, p.x2 - q.x2) < 2.0 * options.radius;
    });
    if (clash == kept.end()) {
      kept.push_back(p);
      members.push_back(1);
      continue;
    }
    const auto c = static_cast<std::size_t>(clash - kept.begin());
    if (std::abs(p.peak - clash->peak) <= 1e-9 * clash->peak) {
      const double w = members[c];
      clash->x1 = (w * clash->x1 + p.x1) / (w + 1.0);
      clash->x2 = (w * clash->x2 + p.x2) / (w + 1.0);
      ++members[c];
    }
  }
  return kept;
}

RealField truncate_and_smooth(const Grid3& g, const ComplexField& beta,
                              const std::vector<Cylinder>& cylinders,
                              double radius) {
  const int n = g.nodes_per_axis();
  const auto nn = static_cast<Eigen::Index>(g.size());
  const double r2 = radius * radius * (1.0 + 1e-9);
  auto inside = [&](const Cylinder& cy, int i, int j) {
    const double d1 = g.coord(i) - cy.x1, d2 = g.coord(j) - cy.x2;
    return d1 * d1 + d2 * d2 <= r2;
  };

  RealField kept = RealField::Zero(nn);
  for (const auto& cy : cylinders) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int l = 1; l < n - 1; ++l)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (inside(cy, i, j))
            peak = std::max(peak, beta[static_cast<Eigen::Index>(g.index(i, j, l))].real());
    const double threshold = std::max(0.0, 0.35 * peak);
    for (int l = 1; l < n - 1; ++l)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          if (!inside(cy, i, j)) continue;
          const auto idx = static_cast<Eigen::Index>(g.index(i, j, l));
          const double re = beta[idx].real();
          if (re > threshold) kept[idx] = re;
        }
  }

  RealField smooth(nn);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double sum = kept[static_cast<Eigen::Index>(g.index(i, j, l))];
        for (int a = 0; a < 3; ++a)
          for (int d = 1; d <= 3; ++d)
            for (int s : {-d, d}) {
              std::array<int, 3> q{i, j, l};
              q[static_cast<std::size_t>(a)] += s;
              if (g.contains(q[0], q[1], q[2]))
                sum += kept[static_cast<Eigen::Index>(g.index(q[0], q[1], q[2]))];
            }
        smooth[static_cast<Eigen::Index>(g.index(i, j, l))] = sum / 19.0;
      }
  return smooth;
}

const char* to_string(TailMode m) { return m == TailMode::Bvp ? "bvp" : "ls"; }

TailMode tail_mode_from_string(const std::string& s) {
  if (s == "bvp") return TailMode::Bvp;
  if (s == "ls") return TailMode::Ls;
  throw ConfigError("tail update mode must be \"bvp\" or \"ls\", got \"" + s + "\"");
}

TailUpdate update_tail(const RealField& c, const Grid3& g,
                       const ComplexField& bottom_data, double k, TailMode mode,
                       const SolverOptions& options) {
  if (static_cast<std::size_t>(c.size()) != g.size())
    throw ConfigError("tail update: coefficient does not match the grid");
  ComplexField u;
  LinearSolveReport report;
  if (mode == TailMode::Bvp) {
    EllipticProblem p(g);
    p.reaction = (k * k) * c.cast<cplx>();
    p.compact_reaction = true;
    p.face(Face::Bottom) = FaceCondition::dirichlet(bottom_data);
    p.face(Face::Top) = FaceCondition::robin(I * k);
    p.face(Face::Lateral) = FaceCondition::neumann();
    EllipticSolution sol = solve(p, options);
    u = std::move(sol.w);
    report = sol.report;
  } else {
    ComplexField rho = (c.array() - 1.0).cast<cplx>().matrix();
    LsSolution sol = solve_ls(make_contrast(g, rho, build_cutoff(g)), k);
    u = std::move(sol.u);
    report = sol.report;
  }
  const double min_u = u.cwiseAbs().minCoeff();
  if (min_u < 1e-10) {
    std::ostringstream os;
    os << "tail update: min |u| = " << min_u << " < 1e-10";
    throw DegenerateDataError(os.str());
  }
  return {log_gradient(g, u), min_u, report};
}

ReconstructionState run_inversion(const PsiSequence& psi,
                                  const BoundaryTrace& tail_trace,
                                  const ComplexField& bottom_kbar,
                                  const InversionOptions& opt) {
  const Grid3& g = psi.grid;
  const FrequencyLadder& lad = psi.ladder;
  if (opt.m < 1 || opt.n_bar < 1 || opt.n_bar > psi.count()) {
    std::ostringstream os;
    os << "inversion: need m >= 1 and 1 <= N_bar <= " << psi.count()
       << " (m = " << opt.m << ", N_bar = " << opt.n_bar << ")";
    throw ConfigError(os.str());
  }
  if (!(tail_trace.grid == g))
    throw ConfigError("inversion: tail trace lives on a different grid");

  using clock = std::chrono::steady_clock;
  TailGradient tail0 = init_tail(tail_trace, opt.solver);
  ReconstructionState st{g, RealField::Ones(static_cast<Eigen::Index>(g.size())),
                         {}, tail0, std::move(tail0), {}, {}, {}};
  st.cylinders = detect_cylinders(st.initial_tail, opt.detection);

  QAccumulator acc(g);
  for (int n = 1; n <= opt.n_bar; ++n) {
    const ComplexField psi_n = psi.boundary_field(n);
    ComplexField q_n;
    ComplexVectorField grad_inner = acc.grad_last();
    for (int i = 1; i <= opt.m; ++i) {
      const auto t0 = clock::now();
      IterationRecord rec;
      rec.n = n;
      rec.i = i;
      rec.k = lad.k(n);
      try {
        EllipticSolution qs = solve_q(n, psi_n, acc, st.tail, lad, opt.solver,
                                      opt.coupling, &grad_inner);
        rec.q_residual = qs.report.residual_norm;
        const VField v = accumulate_v(qs.w, acc, st.tail, lad.h);
        st.beta_raw = reconstruct_beta(v, lad.k(n));
        st.c = truncate_and_smooth(g, st.beta_raw, st.cylinders,
                                   opt.detection.radius);
        st.c.array() += 1.0;
        TailUpdate tu =
            update_tail(st.c, g, bottom_kbar, lad.k_high, opt.mode, opt.solver);
        st.tail = std::move(tu.tail);
        rec.min_abs_u = tu.min_abs_u;
        rec.tail_residual = tu.report.residual_norm;
        if (opt.coupling == QCoupling::Inner) grad_inner = gradient(g, qs.w);
        q_n = std::move(qs.w);
      } catch (const SolverError& e) {
        throw SolverError(step_context(n, i, e), e.report());
      } catch (const DegenerateDataError& e) {
        throw DegenerateDataError(step_context(n, i, e));
      } catch (const ConfigError& e) {
        throw ConfigError(step_context(n, i, e));
      }
      Eigen::Index at = 0;
      rec.max_c = st.c.maxCoeff(&at);
      rec.min_c = st.c.minCoeff();
      rec.argmax = g.point(static_cast<std::size_t>(at));
      if (opt.reference)
        rec.error_max = (st.c - *opt.reference).cwiseAbs().maxCoeff();
      rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      st.history.push_back(rec);
      if (opt.keep_iterates) st.iterates.push_back(st.c);
    }
    acc.push(std::move(q_n));
  }
  return st;
}

}  // namespace freqinv
