#include "freqinv/krylov.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace freqinv {

namespace {

// Complex Givens rotation G = [c s; -conj(s) c] with real c, chosen so that
// G * [a; b] = [r; 0].
struct Givens {
  double c = 1.0;
  cplx s{0.0, 0.0};

  static Givens make(cplx a, cplx b) {
    Givens g;
    const double aa = std::abs(a);
    const double r = std::hypot(aa, std::abs(b));
    if (r == 0.0) return g;
    if (aa == 0.0) {
      g.c = 0.0;
      g.s = 1.0;
      return g;
    }
    g.c = aa / r;
    g.s = (a / aa) * std::conj(b) / r;
    return g;
  }
  void apply(cplx& a, cplx& b) const {
    const cplx ta = c * a + s * b;
    b = -std::conj(s) * a + c * b;
    a = ta;
  }
};

}  // namespace

LinearSolveReport gmres(const LinearOperator& op, const Eigen::VectorXcd& b,
                        Eigen::VectorXcd& x, const GmresOptions& opt,
                        const LinearOperator& precond) {
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Eigen::VectorXcd::Zero(n);
  LinearSolveReport rep;

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    rep.converged = true;
    return rep;
  }

  const int m = std::max(1, opt.restart);
  Eigen::MatrixXcd V(n, m + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  Eigen::VectorXcd g(m + 1);
  std::vector<Givens> rot(static_cast<std::size_t>(m));
  Eigen::VectorXcd w(n), z(n), r(n), tmp(n);

  auto apply_precond = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    if (precond)
      precond(in, out);
    else
      out = in;
  };

  op(x, tmp);
  r = b - tmp;
  double rnorm = r.norm();
  rep.residual_norm = rnorm / bnorm;

  while (rep.residual_norm > opt.tolerance &&
         rep.iterations < opt.max_iterations) {
    V.col(0) = r / rnorm;
    g.setZero();
    g[0] = rnorm;
    H.setZero();
    int k = 0;
    for (; k < m && rep.iterations < opt.max_iterations; ++k) {
      ++rep.iterations;
      apply_precond(V.col(k), z);
      op(z, w);
      // Modified Gram-Schmidt.
      for (int j = 0; j <= k; ++j) {
        const cplx hjk = V.col(j).dot(w);
        H(j, k) = hjk;
        w -= hjk * V.col(j);
      }
      const double hnext = w.norm();
      H(k + 1, k) = hnext;
      if (hnext > 0.0) V.col(k + 1) = w / hnext;
      for (int j = 0; j < k; ++j)
        rot[static_cast<std::size_t>(j)].apply(H(j, k), H(j + 1, k));
      rot[static_cast<std::size_t>(k)] = Givens::make(H(k, k), H(k + 1, k));
      rot[static_cast<std::size_t>(k)].apply(H(k, k), H(k + 1, k));
      rot[static_cast<std::size_t>(k)].apply(g[k], g[k + 1]);
      rep.residual_norm = std::abs(g[k + 1]) / bnorm;
      if (rep.residual_norm <= opt.tolerance || hnext == 0.0) {
        ++k;
        break;
      }
    }
    // Back substitution on the k x k upper triangle.
    Eigen::VectorXcd y = H.topLeftCorner(k, k)
                             .triangularView<Eigen::Upper>()
                             .solve(g.head(k));
    Eigen::VectorXcd update = V.leftCols(k) * y;
    apply_precond(update, z);
    x += z;

    op(x, tmp);
    r = b - tmp;
    rnorm = r.norm();
    rep.residual_norm = rnorm / bnorm;
    if (rnorm == 0.0) break;
  }
  rep.converged = rep.residual_norm <= opt.tolerance;
  return rep;
}

}  // namespace freqinv
