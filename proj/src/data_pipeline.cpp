#include "freqinv/data_pipeline.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace freqinv {

FrequencyLadder FrequencyLadder::make(double k_low, double k_high, double h) {
  if (!(k_low > 0.0) || !(h > 0.0) || !(k_high > k_low)) {
    std::ostringstream os;
    os << "frequency ladder needs 0 < k_low < k_high and h > 0 (k_low "
       << k_low << ", k_high " << k_high << ", h " << h << ")";
    throw ConfigError(os.str());
  }
  const double steps = (k_high - k_low) / h;
  const double r = std::round(steps);
  if (std::abs(steps - r) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream os;
    os << "frequency step h = " << h << " does not divide [" << k_low << ", "
       << k_high << "]";
    throw ConfigError(os.str());
  }
  return {k_low, k_high, h, static_cast<int>(r)};
}

SyntheticData generate_synthetic(const MediumField& medium, const Grid3& omega,
                                 const FrequencyLadder& ladder,
                                 const SolverOptions& options,
                                 TotalField* field_at_kbar) {
  const Grid3& G = medium.grid;
  if (embed(G, omega).half_steps < 1)
    throw ConfigError("synthetic data: Omega must lie strictly inside G");

  MultiFrequencyTrace measured(omega);
  measured.ladder = ladder;
  measured.nodes = classify_boundary(omega).bottom;

  std::optional<BoundaryTrace> tail;
  for (int n = 0; n <= ladder.N; ++n) {
    TotalField u = solve_forward(medium, ladder.k(n), options);
    const ComplexField inner = restrict_field(G, u.u, omega);
    ComplexField g(static_cast<Eigen::Index>(measured.nodes.size()));
    for (std::size_t b = 0; b < measured.nodes.size(); ++b)
      g[static_cast<Eigen::Index>(b)] =
          inner[static_cast<Eigen::Index>(measured.nodes[b])];
    measured.values.push_back(std::move(g));
    if (n == 0) {
      tail = trace_on_omega(u, omega);
      if (field_at_kbar) *field_at_kbar = std::move(u);
    }
  }
  return {std::move(measured), std::move(*tail)};
}

MultiFrequencyTrace complement_backscatter(const MultiFrequencyTrace& trace) {
  const Grid3& g = trace.grid;
  MultiFrequencyTrace out(g);
  out.ladder = trace.ladder;
  out.noise_level = trace.noise_level;
  out.seed = trace.seed;
  out.nodes = classify_boundary(g).all();

  // Measured nodes that sit on the bottom face keep their values.
  std::vector<std::int64_t> source(g.size(), -1);
  for (std::size_t b = 0; b < trace.nodes.size(); ++b) {
    const auto [i, j, l] = g.ijk(trace.nodes[b]);
    if (face_of(g, i, j, l) == Face::Bottom)
      source[trace.nodes[b]] = static_cast<std::int64_t>(b);
  }
  for (std::size_t n = 0; n < trace.values.size(); ++n) {
    const double k = trace.ladder.k(static_cast<int>(n));
    ComplexField v(static_cast<Eigen::Index>(out.nodes.size()));
    for (std::size_t b = 0; b < out.nodes.size(); ++b) {
      const std::size_t idx = out.nodes[b];
      v[static_cast<Eigen::Index>(b)] =
          source[idx] >= 0 ? trace.values[n][source[idx]]
                           : std::exp(-I * (k * g.point(idx)[2]));
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

namespace {

// Uniform on [-1, 1] from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

MultiFrequencyTrace add_noise(const MultiFrequencyTrace& trace, double level,
                              std::uint64_t seed) {
  if (!(level >= 0.0)) {
    std::ostringstream os;
    os << "noise level must be non-negative, got " << level;
    throw ConfigError(os.str());
  }
  MultiFrequencyTrace out = trace;
  out.noise_level = level;
  out.seed = seed;
  if (level == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (auto& v : out.values)
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      const double s1 = symmetric_unit(rng);
      const double s2 = symmetric_unit(rng);
      v[b] *= 1.0 + level * cplx(s1, s2);
    }
  return out;
}

ComplexField PsiSequence::boundary_field(int n) const {
  ComplexField f = ComplexField::Zero(static_cast<Eigen::Index>(grid.size()));
  const ComplexField& p = psi(n);
  for (std::size_t b = 0; b < nodes.size(); ++b)
    f[static_cast<Eigen::Index>(nodes[b])] = p[static_cast<Eigen::Index>(b)];
  return f;
}

PsiSequence compute_psi(const MultiFrequencyTrace& trace) {
  const FrequencyLadder& lad = trace.ladder;
  if (static_cast<int>(trace.values.size()) != lad.node_count()) {
    std::ostringstream os;
    os << "psi: trace holds " << trace.values.size()
       << " frequencies, ladder has " << lad.node_count();
    throw ConfigError(os.str());
  }
  PsiSequence ps{trace.grid, lad, trace.nodes, {}};
  for (int n = 1; n <= lad.usable_psi(); ++n) {
    const ComplexField& g = trace.values[static_cast<std::size_t>(n)];
    const ComplexField& g_lower = trace.values[static_cast<std::size_t>(n + 1)];
    ComplexField psi(g.size());
    for (Eigen::Index b = 0; b < g.size(); ++b) {
      if (std::abs(g[b]) < 1e-12) {
        std::ostringstream os;
        os << "psi: |g| < 1e-12 at node " << trace.nodes[static_cast<std::size_t>(b)]
           << " for k = " << lad.k(n);
        throw DegenerateDataError(os.str());
      }
      psi[b] = (g[b] - g_lower[b]) / (lad.h * g[b]);
    }
    ps.values.push_back(std::move(psi));
  }
  return ps;
}

}  // namespace freqinv
