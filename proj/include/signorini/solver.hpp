#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "signorini/assembly.hpp"
#include "signorini/biortho.hpp"
#include "signorini/linalg.hpp"
#include "signorini/manufactured.hpp"
#include "signorini/mesh.hpp"

namespace signorini {

/// Assembled discrete problem: stiffness, load, Dirichlet lifting and the
/// free/constrained vertex partition.
struct SignoriniSystem {
  const TriMesh* mesh = nullptr;
  TraceMap tmap;
  SparseSymMatrix stiffness;    // all vertices
  DenseVector load;             // all vertices
  DenseVector dirichlet_values; // nodal u_D on Dirichlet vertices, 0 elsewhere
  DenseVector coupling;         // D_j = <phi_j, 1>
  std::vector<bool> is_dirichlet;
  std::vector<int> free_dofs;       // non-Dirichlet vertices, ascending
  std::vector<int> free_index;      // vertex -> position in free_dofs or -1
  std::vector<int> multiplier_free; // multiplier DOF -> position in free_dofs

  [[nodiscard]] std::size_t num_multipliers() const { return tmap.multiplier_dofs.size(); }

  /// x-coordinate of multiplier DOF j.
  [[nodiscard]] double multiplier_x(std::size_t j) const { return mesh->vertices[tmap.multiplier_dofs[j]].x; }
};

/// Builds the system with load `load` and Dirichlet data interpolated from
/// `dirichlet` (called as dirichlet(x, y)).
template <class G>
SignoriniSystem build_system(const TriMesh& mesh, DenseVector load, G&& dirichlet) {
  SignoriniSystem s;
  s.mesh = &mesh;
  s.tmap = trace_map(mesh);
  s.stiffness = assemble_stiffness(mesh);
  s.load = std::move(load);
  s.coupling = coupling_diagonal(mesh, s.tmap);
  s.is_dirichlet = mesh.dirichlet_vertices();
  const auto n = mesh.vertices.size();
  s.dirichlet_values = DenseVector::Zero(static_cast<Eigen::Index>(n));
  s.free_index.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (s.is_dirichlet[v]) {
      s.dirichlet_values[static_cast<Eigen::Index>(v)] = dirichlet(mesh.vertices[v].x, mesh.vertices[v].y);
    } else {
      s.free_index[v] = static_cast<int>(s.free_dofs.size());
      s.free_dofs.push_back(static_cast<int>(v));
    }
  }
  for (int v : s.tmap.multiplier_dofs) s.multiplier_free.push_back(s.free_index[v]);
  return s;
}

inline SignoriniSystem build_system(const TriMesh& mesh, const ExactSolution& sol, const LoadOptions& opts = {}) {
  return build_system(mesh, assemble_load(mesh, sol, opts), [&sol](double x, double y) { return sol.u(x, y); });
}

namespace detail {

/// Principal submatrix on the free vertices.
inline SparseSymMatrix free_block(const SignoriniSystem& s) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(s.stiffness.nonZeros()));
  for (Eigen::Index col = 0; col < s.stiffness.outerSize(); ++col) {
    const int fc = s.free_index[col];
    if (fc < 0) continue;
    for (SparseSymMatrix::InnerIterator it(s.stiffness, col); it; ++it) {
      const int fr = s.free_index[it.row()];
      if (fr >= 0) trip.emplace_back(fr, fc, it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(s.free_dofs.size());
  SparseSymMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

/// Free-row right-hand side F_f - A_fD u_D.
inline DenseVector lifted_rhs(const SignoriniSystem& s) {
  const DenseVector lift = s.stiffness * s.dirichlet_values;
  DenseVector rhs(static_cast<Eigen::Index>(s.free_dofs.size()));
  for (std::size_t p = 0; p < s.free_dofs.size(); ++p) {
    rhs[static_cast<Eigen::Index>(p)] = s.load[s.free_dofs[p]] - lift[s.free_dofs[p]];
  }
  return rhs;
}

inline DenseVector expand_free(const SignoriniSystem& s, const DenseVector& free_values) {
  DenseVector u = s.dirichlet_values;
  for (std::size_t p = 0; p < s.free_dofs.size(); ++p) u[s.free_dofs[p]] = free_values[static_cast<Eigen::Index>(p)];
  return u;
}

}  // namespace detail

struct VISolution {
  FeFunction u_h;
  MultiplierFunction lambda_h;
  std::vector<bool> active_set;   // per multiplier DOF
  int iterations = 0;
  double residual = 0.0;          // ||A u + B lambda - F||_inf on free rows
  std::vector<std::size_t> active_counts;  // per iteration
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, VISolution last) : Error(what), last_(std::move(last)) {}
  [[nodiscard]] const VISolution& last_iterate() const { return last_; }

 private:
  VISolution last_;
};

enum class InitialActiveSet { Empty, ExactContact };

struct PdasOptions {
  double c = 1.0;
  int max_iter = 100;
  InitialActiveSet start = InitialActiveSet::ExactContact;
  /// Overrides `start` when set.
  std::optional<std::vector<bool>> initial;
};

/// Residual ||A u + B lambda - F||_inf over the free rows.
inline double saddle_residual(const SignoriniSystem& s, const DenseVector& u, const DenseVector& lambda) {
  DenseVector r = s.stiffness * u - s.load;
  for (std::size_t j = 0; j < s.num_multipliers(); ++j) {
    const auto v = s.tmap.multiplier_dofs[j];
    r[v] += lambda[static_cast<Eigen::Index>(j)] * s.coupling[static_cast<Eigen::Index>(j)];
  }
  double m = 0.0;
  for (int v : s.free_dofs) m = std::max(m, std::abs(r[v]));
  return m;
}

/// Primal-dual active set solve of the discrete Signorini saddle point
/// problem with nodal obstacle `gap` on the multiplier DOFs.
inline VISolution solve_vi(const SignoriniSystem& s, const DenseVector& gap, const PdasOptions& opts = {}) {
  const std::size_t m = s.num_multipliers();
  if (static_cast<std::size_t>(gap.size()) != m) throw Error("solve_vi: obstacle size mismatch");

  std::vector<bool> active(m, false);
  if (opts.initial) {
    active = *opts.initial;
  } else if (opts.start == InitialActiveSet::ExactContact) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x = s.multiplier_x(j);
      active[j] = x >= ExactSolution::x_l && x <= ExactSolution::x_r;
    }
  }

  const SparseSymMatrix base = detail::free_block(s);
  const DenseVector rhs0 = detail::lifted_rhs(s);
  std::vector<int> active_pos(base.rows(), -1);  // free position -> multiplier index
  for (std::size_t j = 0; j < m; ++j) active_pos[s.multiplier_free[j]] = static_cast<int>(j);

  CholeskySolver chol;
  chol.analyze(base);

  VISolution sol;
  sol.u_h.level = s.mesh->level;
  sol.lambda_h.level = s.mesh->level;
  for (int it = 1; it <= opts.max_iter; ++it) {
    // Active rows and columns become identity-scaled, keeping the pattern.
    SparseSymMatrix mat = base;
    DenseVector rhs = rhs0;
    auto is_active = [&](Eigen::Index p) { return active_pos[p] >= 0 && active[active_pos[p]]; };
    for (Eigen::Index col = 0; col < mat.outerSize(); ++col) {
      const bool col_active = is_active(col);
      for (SparseSymMatrix::InnerIterator e(mat, col); e; ++e) {
        if (e.row() == col) {
          if (col_active) rhs[col] = e.value() * gap[active_pos[col]];
          continue;
        }
        const bool row_active = is_active(e.row());
        if (col_active && !row_active) rhs[e.row()] -= e.value() * gap[active_pos[col]];
        if (col_active || row_active) e.valueRef() = 0.0;
      }
    }
    chol.factorize(mat);
    const DenseVector u = detail::expand_free(s, chol.solve(rhs));

    const DenseVector r = s.load - s.stiffness * u;
    DenseVector lambda = DenseVector::Zero(static_cast<Eigen::Index>(m));
    std::vector<bool> next(m, false);
    std::size_t count = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const int v = s.tmap.multiplier_dofs[j];
      if (active[j]) lambda[jj] = r[v] / s.coupling[jj];
      next[j] = lambda[jj] + opts.c * (u[v] - gap[jj]) / s.coupling[jj] > 0.0;
      count += active[j] ? 1 : 0;
    }

    sol.u_h.coeffs = u;
    sol.lambda_h.coeffs = lambda;
    sol.active_set = active;
    sol.iterations = it;
    sol.active_counts.push_back(count);
    if (next == active) {
      sol.residual = saddle_residual(s, u, lambda);
      return sol;
    }
    active = std::move(next);
  }
  sol.residual = saddle_residual(s, sol.u_h.coeffs, sol.lambda_h.coeffs);
  throw NonConvergenceError("primal-dual active set did not converge in " + std::to_string(opts.max_iter) +
                                " iterations",
                            std::move(sol));
}

/// Zero-obstacle solve used by the convergence study.
inline VISolution solve_vi(const SignoriniSystem& s, const PdasOptions& opts = {}) {
  DenseVector gap(static_cast<Eigen::Index>(s.num_multipliers()));
  for (std::size_t j = 0; j < s.num_multipliers(); ++j) gap[static_cast<Eigen::Index>(j)] = ExactSolution::gap(s.multiplier_x(j));
  return solve_vi(s, gap, opts);
}

/// Linear FEM solution with homogeneous Neumann data on the Signorini side.
inline DenseVector solve_unconstrained(const SignoriniSystem& s) {
  return detail::expand_free(s, linear_subsolve(detail::free_block(s), detail::lifted_rhs(s)));
}

struct TransmissionPoints {
  double x_l = 0.0;
  double x_r = 0.0;
};

/// Extreme x-coordinates of the discrete contact set.
inline TransmissionPoints discrete_transmission_points(const SignoriniSystem& s, const VISolution& sol) {
  std::optional<double> lo;
  std::optional<double> hi;
  for (std::size_t j = 0; j < s.num_multipliers(); ++j) {
    if (!sol.active_set[j]) continue;
    const double x = s.multiplier_x(j);
    lo = lo ? std::min(*lo, x) : x;
    hi = hi ? std::max(*hi, x) : x;
  }
  if (!lo) throw Error("discrete contact set is empty");
  return {*lo, *hi};
}

}  // namespace signorini
