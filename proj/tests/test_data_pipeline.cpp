#include <cmath>
#include <random>

#include "doctest.h"
#include "freqinv/data_pipeline.hpp"

using namespace freqinv;

namespace {

const Grid3& outer() {
  static const Grid3 g(3.0, 0.2);
  return g;
}
const Grid3& omega() {
  static const Grid3 g(2.5, 0.2);
  return g;
}

const SyntheticData& background_data() {
  static const SyntheticData d = generate_synthetic(
      background_medium(outer()), omega(), FrequencyLadder::make(1.0, 2.0, 0.1));
  return d;
}

MultiFrequencyTrace exact_plane_wave_trace(const Grid3& g, const FrequencyLadder& lad) {
  MultiFrequencyTrace t(g);
  t.ladder = lad;
  t.nodes = classify_boundary(g).all();
  for (int n = 0; n <= lad.N; ++n) {
    ComplexField v(static_cast<Eigen::Index>(t.nodes.size()));
    for (std::size_t b = 0; b < t.nodes.size(); ++b)
      v[static_cast<Eigen::Index>(b)] = std::exp(-I * (lad.k(n) * g.point(t.nodes[b])[2]));
    t.values.push_back(v);
  }
  return t;
}

}  // namespace

TEST_CASE("frequency ladder") {
  const FrequencyLadder lad = FrequencyLadder::make(1.0, 2.0, 0.1);
  CHECK(lad.N == 10);
  CHECK(lad.node_count() == 11);
  CHECK(lad.usable_psi() == 8);
  CHECK(lad.k(0) == 2.0);
  CHECK(lad.k(8) == doctest::Approx(1.2));
  CHECK(lad.A(1) == doctest::Approx(1.95));
  CHECK_THROWS_AS(FrequencyLadder::make(1.0, 2.0, 0.3), ConfigError);
  CHECK_THROWS_AS(FrequencyLadder::make(2.0, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(FrequencyLadder::make(0.0, 1.0, 0.1), ConfigError);
}

TEST_CASE("background data on the bottom face is the plane wave") {
  const SyntheticData& d = background_data();
  CHECK(d.measured.nodes.size() == 676);
  CHECK(d.measured.values.size() == 11);
  for (int n : {0, 5, 10}) {
    const double k = d.measured.ladder.k(n);
    const cplx expect = std::exp(I * (k * 2.5));
    const ComplexField& g = d.measured.values[static_cast<std::size_t>(n)];
    CHECK((g.array() - expect).abs().maxCoeff() < 0.03);
    // Constant over the face up to discretization.
    CHECK((g.array() - g[0]).abs().maxCoeff() < 0.03);
  }
}

TEST_CASE("backscatter complement") {
  const SyntheticData& d = background_data();
  const MultiFrequencyTrace full = complement_backscatter(d.measured);
  const Grid3& g = omega();
  CHECK(full.nodes == classify_boundary(g).all());
  const double A = g.half_width();
  std::size_t bottom_seen = 0;
  for (std::size_t b = 0; b < full.nodes.size(); ++b) {
    const auto [i, j, l] = g.ijk(full.nodes[b]);
    const Face f = *face_of(g, i, j, l);
    for (int n = 0; n <= full.ladder.N; ++n) {
      const double k = full.ladder.k(n);
      const cplx v = full.values[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(b)];
      if (f == Face::Top) CHECK(v == std::exp(-I * (k * A)));
      if (f == Face::Bottom) {
        CHECK(v == d.measured.values[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(bottom_seen)]);
      }
      // For background data every face is the plane wave up to discretization.
      CHECK(std::abs(v - std::exp(-I * (k * g.point(full.nodes[b])[2]))) < 0.03);
    }
    if (f == Face::Bottom) ++bottom_seen;
  }
  CHECK(bottom_seen == 676);
}

TEST_CASE("noise model") {
  const MultiFrequencyTrace& clean = background_data().measured;
  SUBCASE("level zero is the identity") {
    const MultiFrequencyTrace t = add_noise(clean, 0.0, 7);
    for (std::size_t n = 0; n < clean.values.size(); ++n) CHECK(t.values[n] == clean.values[n]);
  }
  SUBCASE("relative perturbation is bounded by level * sqrt(2)") {
    const MultiFrequencyTrace t = add_noise(clean, 0.05, 3);
    double worst = 0.0;
    for (std::size_t n = 0; n < clean.values.size(); ++n)
      worst = std::max(worst, ((t.values[n] - clean.values[n]).array() / clean.values[n].array())
                                  .abs()
                                  .maxCoeff());
    CHECK(worst <= 0.05 * std::sqrt(2.0));
    CHECK(worst > 0.05);
  }
  SUBCASE("fixed seed is deterministic and seeds differ") {
    const MultiFrequencyTrace a = add_noise(clean, 0.05, 11);
    const MultiFrequencyTrace b = add_noise(clean, 0.05, 11);
    const MultiFrequencyTrace c = add_noise(clean, 0.05, 12);
    for (std::size_t n = 0; n < clean.values.size(); ++n) CHECK(a.values[n] == b.values[n]);
    CHECK(a.values[0] != c.values[0]);
  }
  SUBCASE("draw order: frequencies, then nodes, real part first") {
    const MultiFrequencyTrace t = add_noise(clean, 0.05, 5);
    std::mt19937_64 rng(5);
    auto draw = [&] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    for (std::size_t n = 0; n < 2; ++n)
      for (Eigen::Index b = 0; b < clean.values[n].size(); ++b) {
        const double s1 = draw();
        const double s2 = draw();
        CHECK(t.values[n][b] == clean.values[n][b] * (1.0 + 0.05 * cplx(s1, s2)));
      }
  }
  CHECK_THROWS_AS(add_noise(clean, -0.1, 1), ConfigError);
}

TEST_CASE("psi of the exact plane wave") {
  const Grid3 g(1.0, 0.25);
  const FrequencyLadder lad = FrequencyLadder::make(1.0, 2.0, 0.1);
  const PsiSequence ps = compute_psi(exact_plane_wave_trace(g, lad));
  CHECK(ps.count() == 8);
  for (int n = 1; n <= ps.count(); ++n)
    for (std::size_t b = 0; b < ps.nodes.size(); ++b) {
      const double x3 = g.point(ps.nodes[b])[2];
      const cplx expect = (1.0 - std::exp(I * (lad.h * x3))) / lad.h;
      CHECK(std::abs(ps.psi(n)[static_cast<Eigen::Index>(b)] - expect) < 1e-12);
      CHECK(std::abs(expect + I * x3) <= lad.h * x3 * x3);
    }
}

TEST_CASE("psi properties") {
  const Grid3 g(1.0, 0.5);
  const FrequencyLadder lad = FrequencyLadder::make(1.0, 2.0, 0.1);
  MultiFrequencyTrace lin(g);
  lin.ladder = lad;
  lin.nodes = classify_boundary(g).all();
  const auto nb = static_cast<Eigen::Index>(lin.nodes.size());
  ComplexField a(nb), b(nb);
  for (Eigen::Index i = 0; i < nb; ++i) {
    a[i] = cplx(2.0 + 0.01 * static_cast<double>(i), 0.5);
    b[i] = cplx(0.25, -0.125 * static_cast<double>(i % 3));
  }
  for (int n = 0; n <= lad.N; ++n) lin.values.push_back(a + lad.k(n) * b);
  SUBCASE("k-linear data has an exact difference quotient") {
    const PsiSequence ps = compute_psi(lin);
    for (int n = 1; n <= ps.count(); ++n) {
      const ComplexField& g_n = lin.values[static_cast<std::size_t>(n)];
      CHECK(((ps.psi(n).array() * g_n.array()) - b.array()).abs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("invariant under a k-independent complex scaling") {
    MultiFrequencyTrace scaled = lin;
    ComplexField s(nb);
    for (Eigen::Index i = 0; i < nb; ++i) s[i] = std::polar(1.0 + 0.1 * static_cast<double>(i % 5), 0.3 * static_cast<double>(i));
    for (auto& v : scaled.values) v = v.cwiseProduct(s);
    const PsiSequence p1 = compute_psi(lin), p2 = compute_psi(scaled);
    for (int n = 1; n <= p1.count(); ++n)
      CHECK((p1.psi(n) - p2.psi(n)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("vanishing data is rejected") {
    MultiFrequencyTrace bad = lin;
    bad.values[3][2] = 0.0;
    CHECK_THROWS_AS(compute_psi(bad), DegenerateDataError);
  }
}

TEST_CASE("noise propagates into psi within the difference-quotient bound") {
  const MultiFrequencyTrace& clean = background_data().measured;
  const PsiSequence p0 = compute_psi(complement_backscatter(clean));
  const PsiSequence p1 = compute_psi(complement_backscatter(add_noise(clean, 0.05, 1)));
  const double bound = 2.0 * (0.05 * std::sqrt(2.0) * 2.0) / 0.1;
  for (int n = 1; n <= p0.count(); ++n)
    CHECK((p0.psi(n) - p1.psi(n)).cwiseAbs().maxCoeff() <= bound);
}
