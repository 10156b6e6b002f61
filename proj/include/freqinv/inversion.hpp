#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqinv/common.hpp"
#include "freqinv/data_pipeline.hpp"
#include "freqinv/elliptic.hpp"
#include "freqinv/forward.hpp"
#include "freqinv/geometry.hpp"

namespace freqinv {

/// Gradient of a tail function and its discrete Laplacian div(grad V).
struct TailGradient {
  Grid3 grid;
  ComplexVectorField grad;
  ComplexField lap;
};

/// Tail gradient with the diagnostics of the solve that produced it.
struct TailUpdate {
  TailGradient tail;
  double min_abs_u = 0.0;
  LinearSolveReport report;
};

/// Harmonic extension of (grad u / u) from the boundary of Omega, one
/// Laplace Dirichlet solve per component.
TailGradient init_tail(const BoundaryTrace& trace,
                       const SolverOptions& options = {});

/// q_1 .. q_{n-1}, their running sum and its derivatives. Starts at q_0 = 0.
class QAccumulator {
 public:
  explicit QAccumulator(const Grid3& g);

  const Grid3& grid() const { return grid_; }
  /// Number of pushed q (n - 1 while solving for q_n).
  int size() const { return static_cast<int>(q_.size()); }
  const ComplexField& q(int j) const;  // q_j, j = 0..size(), q_0 = 0
  const ComplexField& last() const { return q(size()); }
  const ComplexVectorField& grad_last() const { return grad_last_; }
  const ComplexField& sum() const { return sum_; }
  const ComplexVectorField& grad_sum() const { return grad_sum_; }
  const ComplexField& lap_sum() const { return lap_sum_; }

  void push(ComplexField q);

 private:
  Grid3 grid_;
  ComplexField zero_;
  std::vector<ComplexField> q_;
  ComplexField sum_;
  ComplexVectorField grad_last_;
  ComplexVectorField grad_sum_;
  ComplexField lap_sum_;
};

/// Treatment of the coupling term A_n grad q . grad V in the q_n equation.
///   Lagged:   grad q_{n-1} on the right-hand side.
///   Inner:    grad q_{n,i-1} on the right-hand side (q_{n,0} = q_{n-1}).
///   Implicit: grad q_n itself, moved into the drift.
enum class QCoupling { Lagged, Inner, Implicit };

const char* to_string(QCoupling c);
QCoupling q_coupling_from_string(const std::string& s);

/// Assembles the Dirichlet problem for q_n (Lagged form shown):
///   Delta q - A_n h grad(qbar) . grad q =
///     -A_n grad q_{n-1} . grad V + 2 (Delta V + (grad V)^2) / k_{n-1}
///     - 4 grad V . h grad(qbar) / k_{n-1} - 2 h Delta qbar / k_{n-1},
/// q = psi_n on the boundary, qbar = q_0 + ... + q_{n-1}.
/// `grad_inner` is grad q_{n,i-1}, required for QCoupling::Inner only.
EllipticProblem q_problem(int n, const ComplexField& psi_boundary,
                          const QAccumulator& acc, const TailGradient& tail,
                          const FrequencyLadder& ladder,
                          QCoupling coupling = QCoupling::Implicit,
                          const ComplexVectorField* grad_inner = nullptr);

EllipticSolution solve_q(int n, const ComplexField& psi_boundary,
                         const QAccumulator& acc, const TailGradient& tail,
                         const FrequencyLadder& ladder,
                         const SolverOptions& options = {},
                         QCoupling coupling = QCoupling::Implicit,
                         const ComplexVectorField* grad_inner = nullptr);

struct VField {
  ComplexVectorField grad;
  ComplexField lap;
};

/// grad v = -h grad q_n - h grad qbar_{n-1} + grad V and Delta v = div grad v.
VField accumulate_v(const ComplexField& q_n, const QAccumulator& acc,
                    const TailGradient& tail, double h);

/// -(Delta v + (grad v)^2) / k^2 - 1.
ComplexField reconstruct_beta(const VField& v, double k);

struct Cylinder {
  double x1 = 0.0;
  double x2 = 0.0;
  double peak = 0.0;
  /// Peak minus the mean of the plane on the square ring around it.
  double prominence = 0.0;
};

struct DetectionOptions {
  double radius = 0.3;
  /// Half-width of the square ring the prominence is measured against.
  double ring = 0.4;
  /// Fraction of the largest prominence a peak needs to be kept.
  double relative_floor = 0.6;
  /// Minimum prominence as a fraction of the plane median; below it the
  /// plane counts as flat and nothing is detected.
  double absolute_floor = 0.005;
};

/// |d V / d x3| on the node plane one step above the bottom face.
RealField detection_plane(const TailGradient& tail);

/// Interior 8-neighbour local maxima of detection_plane ranked by prominence.
/// The slowly varying interference fringes of the scattered field have low
/// prominence at the ring scale, while the near field of an inclusion does
/// not. Maxima closer than two radii merge: the more prominent one wins and
/// exact ties (a peak straddling two node columns) collapse to their
/// midpoint. Ordered by decreasing prominence.
std::vector<Cylinder> detect_cylinders(const TailGradient& tail,
                                       const DetectionOptions& options = {});

/// Keeps Re beta where it exceeds 0.35 of the maximum over its cylinder, zero
/// elsewhere. Cylinders are closed in (x1, x2) and exclude the top and bottom
/// node planes, where c = 1 is known and beta only has one-sided differences.
/// Then averages each node with its neighbours at
/// offsets 1, 2, 3 along each axis (19 samples, outside samples count as 0).
RealField truncate_and_smooth(const Grid3& g, const ComplexField& beta,
                              const std::vector<Cylinder>& cylinders,
                              double radius = 0.3);

enum class TailMode { Bvp, Ls };

const char* to_string(TailMode m);
TailMode tail_mode_from_string(const std::string& s);

/// Recomputes the tail gradient at k_high from the current coefficient.
///  Bvp: Delta u + k^2 c u = 0 in Omega, u = g on the bottom face,
///       d_n u + i k u = 0 on top, d_n u = 0 on the lateral faces.
///  Ls:  the volume integral equation with contrast cutoff * (c - 1).
/// Then grad V = grad u / u and Delta V = div grad V. Throws
/// DegenerateDataError when min |u| < 1e-10.
TailUpdate update_tail(const RealField& c, const Grid3& g,
                       const ComplexField& bottom_data, double k, TailMode mode,
                       const SolverOptions& options = {});

/// Per (n, i) diagnostics.
struct IterationRecord {
  int n = 0;
  int i = 0;
  double k = 0.0;
  double max_c = 1.0;
  double min_c = 1.0;
  Point argmax{};
  double min_abs_u = 0.0;
  double q_residual = 0.0;
  double tail_residual = 0.0;
  /// max |c - c_true| when a reference coefficient is supplied.
  std::optional<double> error_max;
  double seconds = 0.0;
};

struct InversionOptions {
  int m = 2;
  int n_bar = 7;
  TailMode mode = TailMode::Bvp;
  QCoupling coupling = QCoupling::Implicit;
  DetectionOptions detection;
  SolverOptions solver;
  /// Reference coefficient on the Omega grid for error tracking.
  std::optional<RealField> reference;
  /// Keep c_{n,i} of every iterate in the state.
  bool keep_iterates = false;
};

struct ReconstructionState {
  Grid3 grid;
  RealField c;
  ComplexField beta_raw;
  TailGradient initial_tail;
  TailGradient tail;
  std::vector<Cylinder> cylinders;
  std::vector<IterationRecord> history;
  std::vector<RealField> iterates;
};

/// The full frequency sweep. `bottom_kbar` holds g(., k_high) on the bottom
/// face of `psi.grid` as a full-grid field (zero elsewhere).
ReconstructionState run_inversion(const PsiSequence& psi,
                                  const BoundaryTrace& tail_trace,
                                  const ComplexField& bottom_kbar,
                                  const InversionOptions& options);

}  // namespace freqinv
