#include "freqinv/forward.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

namespace freqinv {

MediumField background_medium(const Grid3& g) {
  return {g, RealField::Ones(static_cast<Eigen::Index>(g.size()))};
}

namespace {

// Length of [x - h/2, x + h/2] inside [lo, hi], divided by h.
double overlap_fraction(double x, double h, double lo, double hi) {
  const double a = std::max(x - 0.5 * h, lo);
  const double b = std::min(x + 0.5 * h, hi);
  return std::max(0.0, b - a) / h;
}

}  // namespace

MediumField build_medium(const Grid3& g, std::span<const Inclusion> inclusions) {
  MediumField m = background_medium(g);
  const int n = g.nodes_per_axis();
  const double h = g.step();
  for (const auto& inc : inclusions) {
    if (!(inc.side > 0.0) || inc.contrast < 1.0) {
      std::ostringstream os;
      os << "medium: inclusion needs side > 0 and contrast >= 1 (side "
         << inc.side << ", contrast " << inc.contrast << ")";
      throw ConfigError(os.str());
    }
    std::array<std::vector<double>, 3> frac;
    for (std::size_t a = 0; a < 3; ++a) {
      frac[a].resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        frac[a][static_cast<std::size_t>(i)] = overlap_fraction(
            g.coord(i), h, inc.center[a] - 0.5 * inc.side,
            inc.center[a] + 0.5 * inc.side);
    }
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double f = frac[0][static_cast<std::size_t>(i)] *
                           frac[1][static_cast<std::size_t>(j)] *
                           frac[2][static_cast<std::size_t>(l)];
          if (f <= 0.0) continue;
          auto& c = m.c[static_cast<Eigen::Index>(g.index(i, j, l))];
          c = std::max(c, 1.0 + (inc.contrast - 1.0) * f);
        }
  }
  return m;
}

void validate_medium(const MediumField& m, double support_half_width) {
  if (static_cast<std::size_t>(m.c.size()) != m.grid.size())
    throw ConfigError("medium: field size does not match grid");
  for (std::size_t idx = 0; idx < m.grid.size(); ++idx) {
    const double c = m.c[static_cast<Eigen::Index>(idx)];
    if (!(c >= 1.0)) {
      std::ostringstream os;
      os << "medium: c = " << c << " < 1 at node " << idx;
      throw ConfigError(os.str());
    }
    const Point x = m.grid.point(idx);
    const bool outside = std::abs(x[0]) >= support_half_width ||
                         std::abs(x[1]) >= support_half_width ||
                         std::abs(x[2]) >= support_half_width;
    if (outside && c != 1.0) {
      std::ostringstream os;
      os << "medium: c = " << c << " != 1 outside the support cube (half-width "
         << support_half_width << ") at node " << idx;
      throw ConfigError(os.str());
    }
  }
}

ComplexField plane_wave(const Grid3& g, double k) {
  ComplexField u(static_cast<Eigen::Index>(g.size()));
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    u[static_cast<Eigen::Index>(idx)] = std::exp(-I * k * g.point(idx)[2]);
  return u;
}

EllipticProblem forward_problem(const MediumField& medium, double k) {
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "forward: wavenumber must be positive, got " << k;
    throw ConfigError(os.str());
  }
  const Grid3& g = medium.grid;
  EllipticProblem p(g);
  p.reaction = (k * k) * medium.c.cast<cplx>();
  p.compact_reaction = true;
  const cplx ik = I * k;
  ComplexField s = ComplexField::Zero(static_cast<Eigen::Index>(g.size()));
  const cplx bottom_data = 2.0 * ik * std::exp(ik * g.half_width());
  for (std::size_t idx : classify_boundary(g).bottom)
    s[static_cast<Eigen::Index>(idx)] = bottom_data;
  p.face(Face::Bottom) = FaceCondition::robin(ik, std::move(s));
  p.face(Face::Top) = FaceCondition::robin(ik);
  p.face(Face::Lateral) = FaceCondition::neumann();
  return p;
}

BackgroundPreconditioner::BackgroundPreconditioner(const Grid3& g, double k)
    : n_(g.nodes_per_axis()) {
  const int n = n_;
  const double h = g.step();
  const double ih2 = 1.0 / (h * h);
  modes_.resize(n, n);
  std::vector<double> shift_eig(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double theta = kPi * m / std::max(1, n - 1);
    shift_eig[static_cast<std::size_t>(m)] = 2.0 * std::cos(theta);
    for (int i = 0; i < n; ++i) modes_(i, m) = std::cos(theta * i);
  }
  modes_inv_ = modes_.inverse();

  // Background operator: beta * (S1 + S2 + S3) + (k^2/2 - 6/h^2) + impedance
  // terms on the x3 end planes, S the mirrored neighbor-sum operator.
  const cplx beta = ih2 + k * k / 12.0;
  const cplx base = k * k / 2.0 - 6.0 * ih2;
  const cplx impedance = -2.0 * I * k / h;
  const auto total = static_cast<std::size_t>(n) * n * n;
  upper_.resize(total);
  inv_pivot_.resize(total);
  lower_.resize(total);
  for (int m2 = 0; m2 < n; ++m2)
    for (int m1 = 0; m1 < n; ++m1) {
      const std::size_t mode = static_cast<std::size_t>(m1 + n * m2);
      const cplx d = base + beta * (shift_eig[static_cast<std::size_t>(m1)] +
                                    shift_eig[static_cast<std::size_t>(m2)]);
      cplx prev_upper = 0.0;
      for (int l = 0; l < n; ++l) {
        const std::size_t at = mode * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(l);
        const cplx diag = d + ((l == 0 || l == n - 1) ? impedance : cplx{});
        const cplx sub = l == 0 ? cplx{} : (l == n - 1 ? 2.0 * beta : beta);
        const cplx sup = l == n - 1 ? cplx{} : (l == 0 ? 2.0 * beta : beta);
        const cplx pivot = diag - sub * prev_upper;
        inv_pivot_[at] = 1.0 / pivot;
        upper_[at] = sup / pivot;
        lower_[at] = sub;
        prev_upper = upper_[at];
      }
    }
}

void BackgroundPreconditioner::apply(const Eigen::VectorXcd& in,
                                     Eigen::VectorXcd& out) const {
  const int n = n_;
  const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
  Eigen::VectorXcd hat(in.size());
  for (int l = 0; l < n; ++l) {
    Eigen::Map<const Eigen::MatrixXcd> x(in.data() + l * plane, n, n);
    Eigen::Map<Eigen::MatrixXcd> y(hat.data() + l * plane, n, n);
    y.noalias() = modes_inv_ * x * modes_inv_.transpose();
  }
  for (std::size_t mode = 0; mode < static_cast<std::size_t>(plane); ++mode) {
    const std::size_t base = mode * static_cast<std::size_t>(n);
    auto v = [&](int l) -> cplx& {
      return hat[static_cast<Eigen::Index>(mode) + l * plane];
    };
    v(0) *= inv_pivot_[base];
    for (int l = 1; l < n; ++l) {
      const std::size_t at = base + static_cast<std::size_t>(l);
      v(l) = (v(l) - lower_[at] * v(l - 1)) * inv_pivot_[at];
    }
    for (int l = n - 2; l >= 0; --l)
      v(l) -= upper_[base + static_cast<std::size_t>(l)] * v(l + 1);
  }
  out.resize(in.size());
  for (int l = 0; l < n; ++l) {
    Eigen::Map<const Eigen::MatrixXcd> y(hat.data() + l * plane, n, n);
    Eigen::Map<Eigen::MatrixXcd> x(out.data() + l * plane, n, n);
    x.noalias() = modes_ * y * modes_.transpose();
  }
}

TotalField solve_forward(const MediumField& medium, double k,
                         const SolverOptions& options) {
  EllipticProblem p = forward_problem(medium, k);
  SolverOptions opt = options;
  if (opt.method == SolveMethod::Auto) opt.method = SolveMethod::Iterative;
  if (opt.method == SolveMethod::Iterative && !opt.preconditioner) {
    auto pre = std::make_shared<BackgroundPreconditioner>(medium.grid, k);
    opt.preconditioner = [pre](const Eigen::VectorXcd& in,
                               Eigen::VectorXcd& out) { pre->apply(in, out); };
  }
  try {
    EllipticSolution sol = solve(p, opt);
    return {medium.grid, std::move(sol.w), k, sol.report};
  } catch (const SolverError& e) {
    std::ostringstream os;
    os << "forward solve at k = " << k << ": " << e.what();
    throw SolverError(os.str(), e.report());
  }
}

GridEmbedding embed(const Grid3& outer, const Grid3& inner) {
  if (std::abs(outer.step() - inner.step()) > 1e-12 * outer.step()) {
    std::ostringstream os;
    os << "grids are not nested: steps " << outer.step() << " and "
       << inner.step();
    throw ConfigError(os.str());
  }
  const double half = 2.0 * (outer.half_width() - inner.half_width()) / outer.step();
  const double r = std::round(half);
  if (std::abs(half - r) > 1e-9 || r < 0.0) {
    std::ostringstream os;
    os << "grids are not nested: half-widths " << outer.half_width() << " and "
       << inner.half_width() << " differ by a non-multiple of half a step";
    throw ConfigError(os.str());
  }
  return {static_cast<int>(r)};
}

namespace {

// Reads an outer-grid field at inner-grid nodes.
class Sampler {
 public:
  Sampler(const Grid3& outer, const ComplexField& f, GridEmbedding e)
      : g_(outer), f_(f), lo_(e.half_steps / 2), aligned_(e.aligned()) {}

  cplx value(int i, int j, int l) const {
    if (aligned_) return at(i + lo_, j + lo_, l + lo_);
    cplx s = 0.0;
    for (int c = 0; c < 8; ++c)
      s += at(i + lo_ + (c & 1), j + lo_ + ((c >> 1) & 1), l + lo_ + ((c >> 2) & 1));
    return s / 8.0;
  }

  cplx derivative(int i, int j, int l, int axis) const {
    std::array<int, 3> p{i + lo_, j + lo_, l + lo_};
    const double h = g_.step();
    if (aligned_) {
      auto q = p, r = p;
      q[static_cast<std::size_t>(axis)] += 1;
      r[static_cast<std::size_t>(axis)] -= 1;
      return (at(q[0], q[1], q[2]) - at(r[0], r[1], r[2])) / (2.0 * h);
    }
    cplx s = 0.0;
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    for (int t = 0; t < 4; ++t) {
      auto q = p;
      q[static_cast<std::size_t>(b)] += t & 1;
      q[static_cast<std::size_t>(c)] += (t >> 1) & 1;
      auto r = q;
      r[static_cast<std::size_t>(axis)] += 1;
      s += at(r[0], r[1], r[2]) - at(q[0], q[1], q[2]);
    }
    return s / (4.0 * h);
  }

 private:
  cplx at(int i, int j, int l) const {
    return f_[static_cast<Eigen::Index>(g_.index(i, j, l))];
  }
  const Grid3& g_;
  const ComplexField& f_;
  int lo_;
  bool aligned_;
};

}  // namespace

ComplexField restrict_field(const Grid3& outer, const ComplexField& f,
                            const Grid3& inner) {
  const Sampler s(outer, f, embed(outer, inner));
  const int n = inner.nodes_per_axis();
  ComplexField out(static_cast<Eigen::Index>(inner.size()));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out[static_cast<Eigen::Index>(inner.index(i, j, l))] = s.value(i, j, l);
  return out;
}

BoundaryTrace trace_on_omega(const TotalField& field, const Grid3& omega) {
  const GridEmbedding e = embed(field.grid, omega);
  if (e.half_steps < 1 || (e.aligned() && e.half_steps < 2)) {
    std::ostringstream os;
    os << "trace: boundary of the inner grid (half-width "
       << omega.half_width() << ") must lie strictly inside the outer grid "
       << "(half-width " << field.grid.half_width() << ")";
    throw ConfigError(os.str());
  }
  const Sampler s(field.grid, field.u, e);
  BoundaryTrace t{omega, classify_boundary(omega).all(), {}, {}, field.k};
  const auto m = static_cast<Eigen::Index>(t.nodes.size());
  t.u.resize(m);
  for (auto& c : t.grad) c.resize(m);
  for (Eigen::Index b = 0; b < m; ++b) {
    const auto [i, j, l] = omega.ijk(t.nodes[static_cast<std::size_t>(b)]);
    t.u[b] = s.value(i, j, l);
    for (int a = 0; a < 3; ++a)
      t.grad[static_cast<std::size_t>(a)][b] = s.derivative(i, j, l, a);
  }
  return t;
}

}  // namespace freqinv
