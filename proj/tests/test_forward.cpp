#include <cmath>
#include <vector>

#include "doctest.h"
#include "freqinv/forward.hpp"
#include "freqinv/verify.hpp"

using namespace freqinv;

namespace {

SolverOptions direct() {
  SolverOptions o;
  o.method = SolveMethod::Direct;
  o.tolerance = 1e-12;
  return o;
}

template <class F>
ComplexField sample(const Grid3& g, F f) {
  ComplexField v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    v[static_cast<Eigen::Index>(idx)] = f(g.point(idx));
  return v;
}

}  // namespace

TEST_CASE("background medium reproduces the plane wave to second order") {
  const double k = 1.0;
  const double e1 = plane_wave_error(2.0, 0.25, k, direct());
  const double e2 = plane_wave_error(2.0, 0.125, k, direct());
  CHECK(e1 < 0.01);
  CHECK(e1 / e2 >= 3.4);
  CHECK(e1 / e2 <= 4.6);
}

TEST_CASE("background plane wave at k = 2, step 0.2 on G = (-3, 3)^3") {
  CHECK(plane_wave_error(3.0, 0.2, 2.0) <= 0.02);
}

TEST_CASE("background scattered part is discretization noise only") {
  const Grid3 g(2.0, 0.2);
  const double k = 1.5;
  const TotalField u = solve_forward(background_medium(g), k);
  const double scattered = (u.u - plane_wave(g, k)).cwiseAbs().maxCoeff();
  const double vol_scale = 1.0;
  CHECK(scattered <= 3.0 * 0.2 * 0.2 * k * k * vol_scale);
}

TEST_CASE("medium sampling carries the inclusion volume") {
  const Grid3 g(2.0, 0.2);
  const std::vector<Inclusion> inc{{{0.0, 0.5, -0.5}, 0.5, 3.0}};
  const MediumField m = build_medium(g, inc);
  const double excess = (m.c.array() - 1.0).sum() * std::pow(0.2, 3);
  CHECK(excess == doctest::Approx(2.0 * 0.125).epsilon(1e-9));
  CHECK(m.c.minCoeff() >= 1.0);
  CHECK_NOTHROW(validate_medium(m, 2.0));
  CHECK_THROWS_AS(validate_medium(m, 0.5), ConfigError);
}

TEST_CASE("a medium symmetric in x1 gives a field symmetric in x1") {
  const Grid3 g(1.6, 0.2);
  const std::vector<Inclusion> inc{{{0.0, 0.4, -0.4}, 0.6, 2.0}};
  const TotalField u = solve_forward(build_medium(g, inc), 2.0, direct());
  const int n = g.nodes_per_axis();
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(u.u[static_cast<Eigen::Index>(g.index(i, j, l))] -
                                         u.u[static_cast<Eigen::Index>(g.index(n - 1 - i, j, l))]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("the field depends continuously on the frequency") {
  const Grid3 g(1.6, 0.2);
  const std::vector<Inclusion> inc{{{0.0, 0.0, 0.0}, 0.6, 3.0}};
  const MediumField m = build_medium(g, inc);
  const ComplexField a = solve_forward(m, 1.5, direct()).u;
  const ComplexField b = solve_forward(m, 1.5 + 1e-3, direct()).u;
  const ComplexField c = solve_forward(m, 1.5 + 2e-3, direct()).u;
  const double d1 = (b - a).norm() / a.norm();
  const double d2 = (c - a).norm() / a.norm();
  CHECK(d1 < 1e-2);
  CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("an inclusion perturbs the bottom trace locally") {
  const Grid3 G(3.0, 0.2), omega(2.5, 0.2);
  const std::vector<Inclusion> inc{{{0.0, 1.5, -1.5}, 0.5, 3.0}};
  const TotalField u = solve_forward(build_medium(G, inc), 2.0);
  const ComplexField inner = restrict_field(G, u.u, omega);
  const BoundaryFaces f = classify_boundary(omega);
  double lo = 1e9, hi = 0.0;
  Point at{};
  for (std::size_t idx : f.bottom) {
    const double v = std::abs(inner[static_cast<Eigen::Index>(idx)]);
    hi = std::max(hi, v);
    if (v < lo) {
      lo = v;
      at = omega.point(idx);
    }
  }
  CHECK(hi - lo > 0.03);
  // The deepest dip of |g| sits under the inclusion.
  CHECK(std::hypot(at[0], at[1] - 1.5) <= 0.5);
}

TEST_CASE("grid embedding") {
  CHECK(embed(Grid3(3.0, 0.2), Grid3(2.5, 0.2)).half_steps == 5);
  CHECK_FALSE(embed(Grid3(3.0, 0.2), Grid3(2.5, 0.2)).aligned());
  CHECK(embed(Grid3(3.0, 0.5), Grid3(2.5, 0.5)).half_steps == 2);
  CHECK(embed(Grid3(3.0, 0.5), Grid3(2.5, 0.5)).aligned());
  CHECK_THROWS_AS(embed(Grid3(3.0, 0.2), Grid3(2.5, 0.1)), ConfigError);
  CHECK_THROWS_AS(embed(Grid3(2.0, 0.2), Grid3(2.5, 0.2)), ConfigError);
}

TEST_CASE("boundary log-derivative of the background field") {
  const Grid3 G(3.0, 0.2), omega(2.5, 0.2);
  const double k = 2.0;
  const TotalField u = solve_forward(background_medium(G), k);
  const BoundaryTrace t = trace_on_omega(u, omega);
  CHECK(t.nodes.size() == classify_boundary(omega).all().size());
  double worst = 0.0;
  for (Eigen::Index b = 0; b < t.u.size(); ++b) {
    worst = std::max(worst, std::abs(t.grad[0][b] / t.u[b]));
    worst = std::max(worst, std::abs(t.grad[1][b] / t.u[b]));
    worst = std::max(worst, std::abs(t.grad[2][b] / t.u[b] + I * k));
  }
  CHECK(worst < 3.0 * 0.04 * k * k);
}

TEST_CASE("trace stencils on manufactured fields") {
  const double h = 0.2;
  SUBCASE("aligned nodes use centered differences over two steps") {
    const Grid3 G(1.4, h), omega(1.0, h);
    const TotalField u{G, sample(G, [](const Point& x) { return std::exp(cplx(x[0])); }), 1.0, {}};
    const BoundaryTrace t = trace_on_omega(u, omega);
    for (Eigen::Index b = 0; b < t.u.size(); ++b) {
      CHECK(std::abs(t.grad[0][b] / t.u[b] - std::sinh(h) / h) < 1e-12);
      CHECK(std::abs(t.grad[1][b]) < 1e-12);
    }
  }
  SUBCASE("cell-centre nodes average four one-step differences") {
    const Grid3 G(1.1, h), omega(1.0, h);
    const TotalField u{G, sample(G, [](const Point& x) { return std::exp(cplx(x[0])); }), 1.0, {}};
    const BoundaryTrace t = trace_on_omega(u, omega);
    const double expect = std::tanh(0.5 * h) / (0.5 * h);
    for (Eigen::Index b = 0; b < t.u.size(); ++b) {
      CHECK(std::abs(t.grad[0][b] / t.u[b] - expect) < 1e-12);
      CHECK(std::abs(t.u[b] - std::exp(omega.point(t.nodes[static_cast<std::size_t>(b)])[0]) *
                                  std::cosh(0.5 * h)) < 1e-12);
    }
  }
  SUBCASE("constant field has zero gradient") {
    const Grid3 G(1.1, h), omega(1.0, h);
    const TotalField u{G, ComplexField::Constant(static_cast<Eigen::Index>(G.size()), cplx(2.0, 1.0)), 1.0, {}};
    const BoundaryTrace t = trace_on_omega(u, omega);
    for (int a = 0; a < 3; ++a) CHECK(t.grad[a].cwiseAbs().maxCoeff() < 1e-12);
  }
}
