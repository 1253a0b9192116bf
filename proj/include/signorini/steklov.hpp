#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "signorini/biortho.hpp"
#include "signorini/linalg.hpp"
#include "signorini/solver.hpp"

namespace signorini {

/// Discrete Dirichlet-to-Neumann map on the Signorini boundary: solves the
/// saddle point problem with weakly imposed trace data. Factorization of
/// the interior block is done once; applies are read-only.
class DirichletNeumannMap {
 public:
  explicit DirichletNeumannMap(const SignoriniSystem& system) : sys_(&system) {
    const auto n = system.mesh->vertices.size();
    interior_index_.assign(n, -1);
    std::vector<bool> is_mult(n, false);
    for (int v : system.tmap.multiplier_dofs) is_mult[v] = true;
    for (int v : system.free_dofs) {
      if (is_mult[v]) continue;
      interior_index_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index col = 0; col < system.stiffness.outerSize(); ++col) {
      const int c = interior_index_[col];
      if (c < 0) continue;
      for (SparseSymMatrix::InnerIterator it(system.stiffness, col); it; ++it) {
        const int r = interior_index_[it.row()];
        if (r >= 0) trip.emplace_back(r, c, it.value());
      }
    }
    const auto ni = static_cast<Eigen::Index>(interior_.size());
    a_ii_.resize(ni, ni);
    a_ii_.setFromTriplets(trip.begin(), trip.end());
    a_ii_.makeCompressed();
    chol_.factorize(a_ii_);
  }

  DirichletNeumannMap(const DirichletNeumannMap&) = delete;
  DirichletNeumannMap& operator=(const DirichletNeumannMap&) = delete;

  [[nodiscard]] const SignoriniSystem& system() const { return *sys_; }
  [[nodiscard]] const std::vector<int>& interior_vertices() const { return interior_; }
  [[nodiscard]] std::size_t num_multipliers() const { return sys_->num_multipliers(); }

  struct SaddleSolution {
    DenseVector w;       // all vertices
    DenseVector lambda;  // multiplier coefficients
  };

  /// Solves a(w, v) + <v, lambda> = F(v), <w, mu> = <t, mu> with nodal trace
  /// values `trace` on the multiplier DOFs and nodal Dirichlet data.
  [[nodiscard]] SaddleSolution solve(const DenseVector& trace, const DenseVector& load,
                                     const DenseVector& dirichlet) const {
    const SignoriniSystem& s = *sys_;
    SaddleSolution out;
    out.w = DenseVector::Zero(load.size());
    for (int v = 0; v < static_cast<int>(out.w.size()); ++v) {
      if (s.is_dirichlet[v]) out.w[v] = dirichlet[v];
    }
    for (std::size_t j = 0; j < s.num_multipliers(); ++j) {
      out.w[s.tmap.multiplier_dofs[j]] = trace[static_cast<Eigen::Index>(j)];
    }
    const DenseVector aw = s.stiffness * out.w;
    DenseVector rhs(static_cast<Eigen::Index>(interior_.size()));
    for (std::size_t p = 0; p < interior_.size(); ++p) {
      rhs[static_cast<Eigen::Index>(p)] = load[interior_[p]] - aw[interior_[p]];
    }
    const DenseVector wi = chol_.solve(rhs);
    for (std::size_t p = 0; p < interior_.size(); ++p) out.w[interior_[p]] = wi[static_cast<Eigen::Index>(p)];

    const DenseVector r = load - s.stiffness * out.w;
    out.lambda.resize(static_cast<Eigen::Index>(s.num_multipliers()));
    for (std::size_t j = 0; j < s.num_multipliers(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out.lambda[jj] = r[s.tmap.multiplier_dofs[j]] / s.coupling[jj];
    }
    return out;
  }

  /// Discrete harmonic extension of nodal trace values (zero on Dirichlet).
  [[nodiscard]] SaddleSolution harmonic(const DenseVector& trace) const {
    const auto n = static_cast<Eigen::Index>(sys_->mesh->vertices.size());
    return solve(trace, DenseVector::Zero(n), DenseVector::Zero(n));
  }

 private:
  const SignoriniSystem* sys_;
  std::vector<int> interior_;
  std::vector<int> interior_index_;
  SparseSymMatrix a_ii_;
  CholeskySolver chol_;
};

/// S_h z = -lambda_{z,h} for nodal trace values z on the multiplier DOFs.
inline MultiplierFunction apply_Sh(const DirichletNeumannMap& map, const DenseVector& z) {
  return {map.system().mesh->level, -map.harmonic(z).lambda};
}

/// Same, with z given through its moments <z, psi_j>.
inline MultiplierFunction apply_Sh_moments(const DirichletNeumannMap& map, const DenseVector& moments) {
  return apply_Sh(map, moments.cwiseQuotient(map.system().coupling));
}

/// <v, mu> on the Signorini boundary for v nodal, mu in the biorthogonal basis.
inline double pairing(const DenseVector& coupling, const DenseVector& v, const DenseVector& mu) {
  return (v.array() * mu.array() * coupling.array()).sum();
}

/// Newton potential: multiplier for volume load `load`, nodal Dirichlet data
/// `dirichlet` on Gamma_D and zero trace moments.
inline MultiplierFunction newton_potential(const DirichletNeumannMap& map, const DenseVector& load,
                                           const DenseVector& dirichlet) {
  const DenseVector zero = DenseVector::Zero(static_cast<Eigen::Index>(map.num_multipliers()));
  return {map.system().mesh->level, map.solve(zero, load, dirichlet).lambda};
}

inline MultiplierFunction newton_potential(const DirichletNeumannMap& map) {
  return newton_potential(map, map.system().load, map.system().dirichlet_values);
}

/// Kinks of the exact trace: transmission points and cut-off knots.
inline std::vector<double> trace_breakpoints(const ExactSolution& sol) {
  const double s0 = sol.cutoff().s0();
  const double s1 = sol.cutoff().s1();
  return {ExactSolution::x_l, ExactSolution::x_r, s0, s1, ExactSolution::kReflect - s0,
          ExactSolution::kReflect - s1};
}

struct LambdaTilde {
  MultiplierFunction lambda;
  FeFunction u_tilde;
  DenseVector moments;  // <u, psi_j>
};

/// Strang quantity: multiplier of the linear saddle point problem with the
/// exact trace moments <u, psi_j> and the full volume data.
inline LambdaTilde lambda_tilde(const DirichletNeumannMap& map, const ExactSolution& sol, double tol = 1e-12) {
  const SignoriniSystem& s = map.system();
  const auto breaks = trace_breakpoints(sol);
  LambdaTilde out;
  out.moments = dual_moments(*s.mesh, s.tmap, [&sol](double x) { return sol.u(x, 0.0); }, breaks, tol);
  const auto res = map.solve(out.moments.cwiseQuotient(s.coupling), s.load, s.dirichlet_values);
  out.lambda = {s.mesh->level, res.lambda};
  out.u_tilde = {s.mesh->level, res.w};
  return out;
}

/// Matrix of z -> D * S_h z, built column by column from saddle solves.
inline Eigen::MatrixXd scaled_sh_matrix(const DirichletNeumannMap& map) {
  const auto m = static_cast<Eigen::Index>(map.num_multipliers());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    DenseVector e = DenseVector::Zero(m);
    e[j] = 1.0;
    out.col(j) = map.system().coupling.cwiseProduct(apply_Sh(map, e).coeffs);
  }
  return out;
}

/// Algebraic Schur complement A_GG - A_GI A_II^{-1} A_IG of the stiffness
/// matrix onto the multiplier DOFs, by dense elimination.
inline Eigen::MatrixXd algebraic_schur(const SignoriniSystem& s) {
  const Eigen::MatrixXd full(s.stiffness);
  const auto& gamma = s.tmap.multiplier_dofs;
  std::vector<int> inner;
  std::vector<bool> is_mult(s.mesh->vertices.size(), false);
  for (int v : gamma) is_mult[v] = true;
  for (int v : s.free_dofs) {
    if (!is_mult[v]) inner.push_back(v);
  }
  const auto ng = static_cast<Eigen::Index>(gamma.size());
  const auto ni = static_cast<Eigen::Index>(inner.size());
  Eigen::MatrixXd agg(ng, ng), agi(ng, ni), aii(ni, ni);
  for (Eigen::Index a = 0; a < ng; ++a) {
    for (Eigen::Index b = 0; b < ng; ++b) agg(a, b) = full(gamma[a], gamma[b]);
    for (Eigen::Index b = 0; b < ni; ++b) agi(a, b) = full(gamma[a], inner[b]);
  }
  for (Eigen::Index a = 0; a < ni; ++a) {
    for (Eigen::Index b = 0; b < ni; ++b) aii(a, b) = full(inner[a], inner[b]);
  }
  if (ni == 0) return agg;
  const Eigen::LLT<Eigen::MatrixXd> llt(aii);
  if (llt.info() != Eigen::Success) throw Error("algebraic_schur: interior block not positive definite");
  return agg - agi * llt.solve(agi.transpose());
}

/// Relative Frobenius discrepancy between the algebraic Schur complement and
/// the D-scaled S_h matrix.
inline double schur_consistency(const DirichletNeumannMap& map) {
  const Eigen::MatrixXd schur = algebraic_schur(map.system());
  const Eigen::MatrixXd sh = scaled_sh_matrix(map);
  return (schur - sh).norm() / schur.norm();
}

struct BoundaryVISolution {
  DenseVector trace;
  DenseVector lambda;
  std::vector<bool> active_set;
  int iterations = 0;
};

/// Boundary variational inequality <v - u, S_h u - N> >= 0 for v <= gap,
/// in D-scaled matrix form (schur u - D N = -D lambda), solved by a dense
/// primal-dual active set iteration.
inline BoundaryVISolution solve_boundary_vi(const Eigen::MatrixXd& schur, const DenseVector& newton,
                                            const DenseVector& coupling, const DenseVector& gap,
                                            double c = 1.0, int max_iter = 100) {
  const Eigen::Index m = schur.rows();
  const DenseVector b = coupling.cwiseProduct(newton);
  std::vector<bool> active(static_cast<std::size_t>(m), false);
  BoundaryVISolution out;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd mat = schur;
    DenseVector rhs = b;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!active[j]) continue;
      rhs -= schur.col(j) * gap[j];
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!active[j]) continue;
      mat.row(j).setZero();
      mat.col(j).setZero();
      mat(j, j) = 1.0;
      rhs[j] = gap[j];
    }
    const DenseVector u = mat.llt().solve(rhs);
    DenseVector lambda = (b - schur * u).cwiseQuotient(coupling);
    std::vector<bool> next(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!active[j]) lambda[j] = 0.0;
      next[j] = lambda[j] + c * (u[j] - gap[j]) / coupling[j] > 0.0;
    }
    out = {u, lambda, active, it};
    if (next == active) return out;
    active = std::move(next);
  }
  throw Error("boundary variational inequality: active set iteration did not converge");
}

}  // namespace signorini
