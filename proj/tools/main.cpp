#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "freqinv/io.hpp"
#include "freqinv/pipeline.hpp"
#include "freqinv/verify.hpp"

namespace fs = std::filesystem;
using namespace freqinv;

namespace {

struct Overrides {
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<int> sweeps;
  std::optional<int> inner;
  std::optional<std::string> tail_mode;
  std::optional<double> grid_step;
  std::string q_coupling = "implicit";
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--noise", o.noise, "Noise level (fraction, e.g. 0.05)");
  cmd->add_option("--seed", o.seed, "Noise RNG seed");
  cmd->add_option("--sweeps", o.sweeps, "Number of frequency sweeps N_bar");
  cmd->add_option("--inner", o.inner, "Inner iterations m per frequency");
  cmd->add_option("--tail-mode", o.tail_mode, "Tail update: bvp or ls")
      ->check(CLI::IsMember({"bvp", "ls"}));
  cmd->add_option("--grid-step", o.grid_step, "Spatial grid step");
  cmd->add_option("--q-coupling", o.q_coupling,
                  "Coupling term of the q equation: implicit, inner or lagged")
      ->check(CLI::IsMember({"implicit", "inner", "lagged"}));
}

Scenario load_with_overrides(const fs::path& path, const Overrides& o) {
  Scenario s = load_scenario(path);
  if (o.noise) s.noise_level = *o.noise;
  if (o.seed) s.seed = *o.seed;
  if (o.sweeps) s.n_bar = *o.sweeps;
  if (o.inner) s.m = *o.inner;
  if (o.tail_mode) s.tail_mode = tail_mode_from_string(*o.tail_mode);
  if (o.grid_step) s.step = *o.grid_step;
  validate(s);
  return s;
}

void print_trace_summary(const Scenario& s, const SyntheticData& d) {
  const auto& g0 = d.measured.values.front();
  const double lo = g0.cwiseAbs().minCoeff(), hi = g0.cwiseAbs().maxCoeff();
  std::printf("|g| on the bottom face at k = %.3g: min %.6f, max %.6f%s\n",
              s.k_high, lo, hi,
              s.inclusions.empty() ? " (background)" : "");
}

void forward_outputs(const Scenario& s, const ForwardResult& r, const fs::path& out) {
  write_trace_csv(out / "traces.csv", r.data.measured);
  write_trace_cache(out / "traces.bin", r.data);
  write_field_vtk(out / "u_kbar.vtk", r.field_kbar.grid, r.field_kbar.u, "u");
  std::printf("forward: %d frequencies solved in %.2f s, outputs in %s\n",
              s.ladder().node_count(), r.seconds, out.string().c_str());
  print_trace_summary(s, r.data);
}

void invert_outputs(const InversionResult& r, const fs::path& out) {
  write_field_vtk(out / "c_comp.vtk", r.state.grid, r.state.c, "c");
  write_metrics(out / "metrics.json", r.state.history, r.summary);
  write_iterations_jsonl(out / "iterations.jsonl", r.state.history);
  std::printf("invert: %zu cylinder(s) detected, max c = %.4f at (%.2f, %.2f, %.2f), "
              "%zu component(s)",
              r.state.cylinders.size(), r.summary.max_c, r.summary.argmax[0],
              r.summary.argmax[1], r.summary.argmax[2], r.summary.centroids.size());
  if (r.summary.relative_error_pct)
    std::printf(", relative error %.2f%%", *r.summary.relative_error_pct);
  std::printf("\n");
}

InversionResult invert_with_progress(const Scenario& s, const SyntheticData& d,
                                     QCoupling coupling) {
  std::printf("invert: m = %d, N_bar = %d, tail mode %s, q coupling %s, noise %.3g, "
              "seed %llu\n",
              s.m, s.n_bar, to_string(s.tail_mode), to_string(coupling), s.noise_level,
              static_cast<unsigned long long>(s.seed));
  InversionRunOptions opt;
  opt.coupling = coupling;
  InversionResult r = run_inversion(s, d, opt);
  for (const auto& rec : r.state.history)
    std::printf("  n = %d, i = %d: max c = %.4f, min |u| = %.4f (%.2f s)\n", rec.n,
                rec.i, rec.max_c, rec.min_abs_u, rec.seconds);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-stepping reconstruction of a dielectric coefficient "
               "from backscatter data"};
  app.require_subcommand(1);

  fs::path scenario_path, out_dir = "out", traces_path;
  Overrides ov;

  auto* fwd = app.add_subcommand("forward", "Generate synthetic traces");
  fwd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  fwd->add_option("--out", out_dir, "Output directory");
  add_overrides(fwd, ov);

  auto* inv = app.add_subcommand("invert", "Reconstruct c from cached traces");
  inv->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  inv->add_option("--traces", traces_path,
                  "Trace cache written by forward (default OUT/traces.bin)");
  inv->add_option("--out", out_dir, "Output directory");
  add_overrides(inv, ov);

  auto* pipe = app.add_subcommand("pipeline", "Forward data and inversion");
  pipe->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  pipe->add_option("--out", out_dir, "Output directory");
  add_overrides(pipe, ov);

  std::string level = "quick";
  double tolerance = 1e-8;
  auto* ver = app.add_subcommand("verify", "Run the built-in oracle suites");
  ver->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--tolerance", tolerance,
                  "Solver tolerance for the manufactured-solution check");

  CLI11_PARSE(app, argc, argv);

  if (ver->parsed()) {
    int failed = 0;
    for (const auto& r : run_verify({level == "full", tolerance})) {
      std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                  r.detail.c_str());
      failed += r.passed ? 0 : 1;
    }
    std::printf("%s\n", failed ? "verify: FAILED" : "verify: all checks passed");
    return failed ? 1 : 0;
  }

  Scenario s;
  try {
    s = load_with_overrides(scenario_path, ov);
  } catch (const ConfigError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const QCoupling coupling = q_coupling_from_string(ov.q_coupling);
  try {
    fs::create_directories(out_dir);
    if (fwd->parsed()) {
      forward_outputs(s, run_forward(s), out_dir);
    } else if (inv->parsed()) {
      const fs::path cache = traces_path.empty() ? out_dir / "traces.bin" : traces_path;
      invert_outputs(invert_with_progress(s, read_trace_cache(cache), coupling), out_dir);
    } else {
      const ForwardResult f = run_forward(s);
      forward_outputs(s, f, out_dir);
      invert_outputs(invert_with_progress(s, f.data, coupling), out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
