#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "freqinv/common.hpp"
#include "freqinv/forward.hpp"
#include "freqinv/geometry.hpp"

namespace freqinv {

/// Uniform partition k_n = k_high - n h, n = 0..N, of [k_low, k_high].
struct FrequencyLadder {
  double k_low = 1.0;
  double k_high = 2.0;
  double h = 0.1;
  int N = 10;

  /// Validates k_low > 0, h > 0 and that h divides the interval.
  static FrequencyLadder make(double k_low, double k_high, double h);

  double k(int n) const { return k_high - n * h; }
  int node_count() const { return N + 1; }

  /// A_n = 1 + k_n / k_{n-1}, n >= 1.
  double A(int n) const { return 1.0 + k(n) / k(n - 1); }

  /// Number of psi_n retained for the sweep: n = 1..N-2, the last node being
  /// the difference anchor only.
  int usable_psi() const { return N >= 2 ? N - 2 : 0; }

  bool operator==(const FrequencyLadder&) const = default;
};

/// Boundary values g(x, k_n) at a fixed list of Omega-grid boundary nodes.
/// values[n][b] belongs to nodes[b] at frequency k_n.
struct MultiFrequencyTrace {
  Grid3 grid;
  FrequencyLadder ladder;
  std::vector<std::size_t> nodes;
  std::vector<ComplexField> values;
  double noise_level = 0.0;
  std::uint64_t seed = 0;

  explicit MultiFrequencyTrace(const Grid3& g) : grid(g) {}
};

/// Measured bottom-face data over the ladder plus the full-boundary u and
/// grad u at k_high used to start the tail.
struct SyntheticData {
  MultiFrequencyTrace measured;
  BoundaryTrace tail_trace;
};

/// Solves the forward problem on `medium.grid` at every ladder frequency and
/// samples the bottom face of `omega`. If `field_at_kbar` is non-null it
/// receives the total field at k_high.
SyntheticData generate_synthetic(const MediumField& medium, const Grid3& omega,
                                 const FrequencyLadder& ladder,
                                 const SolverOptions& options = {},
                                 TotalField* field_at_kbar = nullptr);

/// Extends a bottom-face trace to all of the boundary of Omega, filling the
/// other faces with the plane wave exp(-i k_n x3).
MultiFrequencyTrace complement_backscatter(const MultiFrequencyTrace& trace);

/// Multiplicative noise g (1 + level (s1 + i s2)), s1 and s2 uniform on
/// [-1, 1]. Draws run over frequencies, then nodes, s1 before s2, from a
/// 64-bit Mersenne twister seeded with `seed`.
MultiFrequencyTrace add_noise(const MultiFrequencyTrace& trace, double level,
                              std::uint64_t seed);

/// psi_n = (g(k_n) - g(k_n - h)) / (h g(k_n)) at the trace nodes.
struct PsiSequence {
  Grid3 grid;
  FrequencyLadder ladder;
  std::vector<std::size_t> nodes;
  std::vector<ComplexField> values;  // values[n - 1] holds psi_n

  int count() const { return static_cast<int>(values.size()); }
  const ComplexField& psi(int n) const {
    return values.at(static_cast<std::size_t>(n - 1));
  }
  /// psi_n as a full-grid field, zero away from the trace nodes.
  ComplexField boundary_field(int n) const;
};

/// Throws DegenerateDataError naming node and frequency when |g| < 1e-12.
PsiSequence compute_psi(const MultiFrequencyTrace& trace);

}  // namespace freqinv
