#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "freqinv/common.hpp"

namespace freqinv {

/// Outcome of a linear solve. `residual_norm` is the relative discrete l2
/// residual ||b - A x|| / ||b||.
struct LinearSolveReport {
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, LinearSolveReport report)
      : Error(what), report_(report) {}
  const LinearSolveReport& report() const { return report_; }

 private:
  LinearSolveReport report_;
};

using LinearOperator =
    std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct GmresOptions {
  int restart = 50;
  int max_iterations = 10000;
  double tolerance = 1e-8;
};

/// Restarted GMRES with right preconditioning, so the monitored residual is
/// the true (unpreconditioned) one. `x` carries the initial guess in and the
/// solution out. An empty `precond` means identity.
LinearSolveReport gmres(const LinearOperator& op, const Eigen::VectorXcd& b,
                        Eigen::VectorXcd& x, const GmresOptions& opt,
                        const LinearOperator& precond = {});

}  // namespace freqinv
