#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqinv/common.hpp"
#include "freqinv/data_pipeline.hpp"
#include "freqinv/forward.hpp"
#include "freqinv/geometry.hpp"
#include "freqinv/inversion.hpp"

namespace freqinv {

struct Scenario {
  std::string name = "scenario";
  double A = 2.5;       // Omega = (-A, A)^3
  double A1 = 3.0;      // G = (-A1, A1)^3
  double step = 0.2;
  double k_low = 1.0;
  double k_high = 2.0;
  double h = 0.1;
  int m = 2;
  int n_bar = 7;
  double noise_level = 0.05;
  std::uint64_t seed = 1;
  TailMode tail_mode = TailMode::Bvp;
  std::vector<Inclusion> inclusions;

  Grid3 omega_grid() const { return Grid3(A, step); }
  Grid3 outer_grid() const { return Grid3(A1, step); }
  FrequencyLadder ladder() const { return FrequencyLadder::make(k_low, k_high, h); }

  bool operator==(const Scenario&) const = default;
};

/// Throws ConfigError naming the offending field and values.
void validate(const Scenario& s);

/// Parses a JSON document. Missing fields take the defaults above; unknown
/// fields are rejected. The result is validated.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);

/// Legacy ASCII VTK STRUCTURED_POINTS. Complex fields produce the arrays
/// `<name>_real` and `<name>_imag`.
void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const RealField& f, const std::string& name = "c");
void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const ComplexField& f, const std::string& name = "u");

struct VtkArray {
  std::string name;
  RealField values;
};

struct VtkFile {
  int dims = 0;
  Point origin{};
  double spacing = 0.0;
  std::vector<VtkArray> arrays;
};

VtkFile read_field_vtk(const std::filesystem::path& path);

/// Summary of a reconstruction.
struct Summary {
  double max_c = 1.0;
  Point argmax{};
  std::vector<Point> centroids;
  std::optional<double> true_max;
  std::optional<double> relative_error_pct;
  std::vector<std::pair<std::string, double>> stage_seconds;
};

/// Connected components (6-neighbour) of {c - 1 >= 0.35 (max c - 1)},
/// returned as centroids weighted by c - 1. Empty when c == 1 everywhere.
std::vector<Point> component_centroids(const Grid3& g, const RealField& c);

/// |true / computed - 1| * 100.
double relative_error_pct(double true_max, double computed_max);

Summary summarize(const ReconstructionState& st,
                  std::optional<double> true_max = std::nullopt);

void write_metrics(const std::filesystem::path& path,
                   const std::vector<IterationRecord>& records,
                   const std::optional<Summary>& summary);
void write_iterations_jsonl(const std::filesystem::path& path,
                            const std::vector<IterationRecord>& records);

/// One row per trace node: x1, x2, x3, then Re g and Im g per frequency.
void write_trace_csv(const std::filesystem::path& path,
                     const MultiFrequencyTrace& trace);

/// Binary cache of synthetic data, little-endian throughout:
///   "IMH1", u32 version (1),
///   f64 half_width, f64 step, u32 nodes_per_axis,
///   f64 k_low, f64 k_high, f64 h, u32 N,
///   u32 node count B, B x u64 node index,
///   (N + 1) x B x (f64 re, f64 im) measured values (frequency-major),
///   f64 k, u32 node count T, T x u64 node index,
///   4 x T x (f64 re, f64 im) for u, d1 u, d2 u, d3 u at k_high.
void write_trace_cache(const std::filesystem::path& path,
                       const SyntheticData& data);
SyntheticData read_trace_cache(const std::filesystem::path& path);

}  // namespace freqinv
