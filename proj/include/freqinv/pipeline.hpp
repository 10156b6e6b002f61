#pragma once

#include <optional>

#include "freqinv/data_pipeline.hpp"
#include "freqinv/forward.hpp"
#include "freqinv/inversion.hpp"
#include "freqinv/io.hpp"

namespace freqinv {

struct ForwardResult {
  MediumField medium;
  SyntheticData data;
  TotalField field_kbar;
  double seconds = 0.0;
};

/// Builds the medium on G and generates the synthetic traces.
ForwardResult run_forward(const Scenario& s, const SolverOptions& options = {});

/// True coefficient sampled on the Omega grid.
RealField true_coefficient(const Scenario& s);

struct InversionRunOptions {
  SolverOptions solver;
  QCoupling coupling = QCoupling::Implicit;
  bool keep_iterates = false;
  /// Track max |c - c_true| per iterate.
  bool track_error = false;
};

struct InversionResult {
  ReconstructionState state;
  Summary summary;
  MultiFrequencyTrace noisy;  // measured bottom data after noise
};

/// Noise on the measured bottom trace, backscatter complement, psi, then the
/// frequency sweep with the scenario's m, N_bar and tail mode.
InversionResult run_inversion(const Scenario& s, const SyntheticData& data,
                              const InversionRunOptions& options = {});

}  // namespace freqinv
