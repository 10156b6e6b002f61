#include "freqinv/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace freqinv {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

ForwardResult run_forward(const Scenario& s, const SolverOptions& options) {
  validate(s);
  const auto t0 = std::chrono::steady_clock::now();
  ForwardResult r{build_medium(s.outer_grid(), s.inclusions), {
                      MultiFrequencyTrace(s.omega_grid()),
                      BoundaryTrace{s.omega_grid(), {}, {}, {}, 0.0}},
                  TotalField{s.outer_grid(), {}, 0.0, {}}, 0.0};
  validate_medium(r.medium, s.A);
  r.data = generate_synthetic(r.medium, s.omega_grid(), s.ladder(), options,
                              &r.field_kbar);
  r.seconds = seconds_since(t0);
  return r;
}

RealField true_coefficient(const Scenario& s) {
  return build_medium(s.omega_grid(), s.inclusions).c;
}

InversionResult run_inversion(const Scenario& s, const SyntheticData& data,
                              const InversionRunOptions& options) {
  validate(s);
  const Grid3 omega = s.omega_grid();
  if (!(data.measured.grid == omega) || !(data.measured.ladder == s.ladder()))
    throw ConfigError("inversion: trace data does not match the scenario grid or ladder");

  const auto t0 = std::chrono::steady_clock::now();
  MultiFrequencyTrace noisy = add_noise(data.measured, s.noise_level, s.seed);
  const PsiSequence psi = compute_psi(complement_backscatter(noisy));

  ComplexField bottom = ComplexField::Zero(static_cast<Eigen::Index>(omega.size()));
  for (std::size_t b = 0; b < noisy.nodes.size(); ++b)
    bottom[static_cast<Eigen::Index>(noisy.nodes[b])] =
        noisy.values[0][static_cast<Eigen::Index>(b)];
  const double prep = seconds_since(t0);

  InversionOptions io;
  io.m = s.m;
  io.n_bar = s.n_bar;
  io.mode = s.tail_mode;
  io.solver = options.solver;
  io.coupling = options.coupling;
  io.keep_iterates = options.keep_iterates;
  if (options.track_error) io.reference = true_coefficient(s);

  const auto t1 = std::chrono::steady_clock::now();
  ReconstructionState st = freqinv::run_inversion(psi, data.tail_trace, bottom, io);
  const double sweep = seconds_since(t1);

  std::optional<double> true_max;
  for (const auto& inc : s.inclusions)
    true_max = std::max(true_max.value_or(1.0), inc.contrast);
  Summary sum = summarize(st, s.inclusions.empty() ? std::optional<double>{} : true_max);
  sum.stage_seconds = {{"data_preparation", prep}, {"inversion", sweep}};
  return {std::move(st), std::move(sum), std::move(noisy)};
}

}  // namespace freqinv
