#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstddef>

#include "signorini/error.hpp"

namespace signorini {

using SparseSymMatrix = Eigen::SparseMatrix<double>;
using DenseVector = Eigen::VectorXd;

/// Above this size linear_subsolve switches from sparse Cholesky to
/// Jacobi-preconditioned CG.
inline constexpr Eigen::Index kDirectSolveLimit = 200000;

struct SubsolveOptions {
  Eigen::Index direct_limit = kDirectSolveLimit;
  double cg_tolerance = 1e-12;
  int refinement_steps = 2;
};

/// Sparse Cholesky factorization whose symbolic analysis can be reused for
/// matrices with the same sparsity pattern.
class CholeskySolver {
 public:
  void analyze(const SparseSymMatrix& a) {
    llt_.analyzePattern(a);
    analyzed_ = true;
  }

  void factorize(const SparseSymMatrix& a) {
    if (!analyzed_) analyze(a);
    llt_.factorize(a);
    if (llt_.info() != Eigen::Success) {
      throw Error("sparse Cholesky failed: matrix is not symmetric positive definite");
    }
    matrix_ = &a;
  }

  /// Solve with a few steps of iterative refinement against the factorized
  /// matrix (which must still be alive).
  [[nodiscard]] DenseVector solve(const DenseVector& rhs, int refinement_steps = 2) const {
    DenseVector x = llt_.solve(rhs);
    for (int k = 0; k < refinement_steps; ++k) {
      const DenseVector r = rhs - (*matrix_) * x;
      if (r.norm() <= 1e-15 * rhs.norm()) break;
      x += llt_.solve(r);
    }
    return x;
  }

 private:
  Eigen::SimplicialLLT<SparseSymMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  const SparseSymMatrix* matrix_ = nullptr;
  bool analyzed_ = false;
};

/// Solves a symmetric positive definite system: direct factorization up to
/// `direct_limit` unknowns, Jacobi-preconditioned CG beyond.
inline DenseVector linear_subsolve(const SparseSymMatrix& a, const DenseVector& rhs,
                                   const SubsolveOptions& opts = {}) {
  if (a.rows() != a.cols() || a.rows() != rhs.size()) throw Error("linear_subsolve: dimension mismatch");
  if (rhs.size() == 0) return rhs;
  if (a.rows() <= opts.direct_limit) {
    CholeskySolver chol;
    chol.factorize(a);
    return chol.solve(rhs, opts.refinement_steps);
  }
  Eigen::ConjugateGradient<SparseSymMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(opts.cg_tolerance);
  cg.setMaxIterations(static_cast<Eigen::Index>(10 * a.rows()));
  cg.compute(a);
  DenseVector x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) throw Error("linear_subsolve: CG did not converge");
  return x;
}

}  // namespace signorini
