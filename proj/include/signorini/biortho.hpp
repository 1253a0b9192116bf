#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "signorini/assembly.hpp"
#include "signorini/linalg.hpp"
#include "signorini/mesh.hpp"
#include "signorini/quadrature.hpp"

namespace signorini {

/// Multiplier in the biorthogonal basis: one coefficient per interior
/// Signorini vertex (TraceMap::multiplier_dofs order).
struct MultiplierFunction {
  int level = 0;
  DenseVector coeffs;

  /// Membership in the discrete cone M_h^+.
  [[nodiscard]] bool in_discrete_cone(double tol = 0.0) const { return (coeffs.array() >= -tol).all(); }
};

/// Dual shape functions on the reference trace element [0, 1], paired with
/// the hats 1 - t (left) and t (right).
inline std::pair<double, double> dual_shape_values(double t) { return {2.0 - 3.0 * t, 3.0 * t - 1.0}; }

/// Diagonal of the trace coupling <phi_j, psi_i> = delta_ij <phi_j, 1>.
inline DenseVector coupling_diagonal(const TriMesh& mesh, const TraceMap& tmap) {
  return boundary_lumped_mass(mesh, tmap);
}

/// psi_j evaluated at x; `j` indexes multiplier DOFs, `xs` are the trace
/// coordinates. Crosspoint duals at the two corners are dropped.
inline double psi_value(std::span<const double> xs, const TraceMap& tmap, std::size_t j, double x) {
  const int v = tmap.multiplier_dofs[j];
  const auto k = static_cast<std::size_t>(
      std::find(tmap.signorini_vertices.begin(), tmap.signorini_vertices.end(), v) -
      tmap.signorini_vertices.begin());
  if (x >= xs[k - 1] && x <= xs[k]) {
    return dual_shape_values((x - xs[k - 1]) / (xs[k] - xs[k - 1])).second;
  }
  if (x >= xs[k] && x <= xs[k + 1]) {
    return dual_shape_values((x - xs[k]) / (xs[k + 1] - xs[k])).first;
  }
  return 0.0;
}

/// Value of sum_j alpha_j psi_j at x (discontinuous; right limit at nodes).
inline double evaluate_multiplier(std::span<const double> xs, const TraceMap& tmap,
                                  const MultiplierFunction& lambda, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t e = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  e = std::min(e, xs.size() - 2);
  const double t = (x - xs[e]) / (xs[e + 1] - xs[e]);
  const auto [left, right] = dual_shape_values(t);
  // Multiplier index of trace vertex k is k - 1 (corners carry none).
  double value = 0.0;
  if (tmap.interior[e]) value += lambda.coeffs[static_cast<Eigen::Index>(e) - 1] * left;
  if (tmap.interior[e + 1]) value += lambda.coeffs[static_cast<Eigen::Index>(e)] * right;
  return value;
}

/// Full coupling matrix <phi_i, psi_j>: rows are all Signorini vertices in
/// trace order, columns multiplier DOFs. Integrated by 3-point Gauss per
/// trace element (exact for the quadratic integrand).
inline Eigen::MatrixXd coupling_matrix(const TriMesh& mesh, const TraceMap& tmap) {
  const auto xs = trace_coordinates(mesh, tmap);
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto m = static_cast<Eigen::Index>(tmap.multiplier_dofs.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m);
  constexpr std::array<double, 3> gx{0.1127016653792583, 0.5, 0.8872983346207417};
  constexpr std::array<double, 3> gw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    const double len = xs[e + 1] - xs[e];
    for (int q = 0; q < 3; ++q) {
      const double t = gx[q];
      const double w = gw[q] * len;
      const std::array<double, 2> phi{1.0 - t, t};
      const auto [dl, dr] = dual_shape_values(t);
      const std::array<double, 2> psi{dl, dr};
      for (int a = 0; a < 2; ++a) {
        const Eigen::Index row = e + a;
        for (int b = 0; b < 2; ++b) {
          const Eigen::Index vertex = e + b;
          if (!tmap.interior[vertex]) continue;
          c(row, vertex - 1) += w * phi[a] * psi[b];
        }
      }
    }
  }
  return c;
}

/// Re-expansion of the multiplier coefficients in the nodal hat basis: one
/// value per Signorini vertex, zero at the two corners.
inline std::vector<double> postprocess_lambda_hat(const TraceMap& tmap, const MultiplierFunction& lambda) {
  std::vector<double> nodal(tmap.signorini_vertices.size(), 0.0);
  Eigen::Index j = 0;
  for (std::size_t k = 0; k < nodal.size(); ++k) {
    if (tmap.interior[k]) nodal[k] = lambda.coeffs[j++];
  }
  return nodal;
}

/// Piecewise-linear interpolation of nodal trace values at x.
inline double evaluate_trace(std::span<const double> xs, std::span<const double> nodal, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t e = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  e = std::min(e, xs.size() - 2);
  const double t = (x - xs[e]) / (xs[e + 1] - xs[e]);
  return (1.0 - t) * nodal[e] + t * nodal[e + 1];
}

/// Moments <g, psi_j> for every multiplier DOF by adaptive Gauss-Kronrod on
/// each trace element, splitting at `breaks`.
template <class G>
DenseVector dual_moments(const TriMesh& mesh, const TraceMap& tmap, G&& g, std::span<const double> breaks,
                         double tol = 1e-12) {
  const auto xs = trace_coordinates(mesh, tmap);
  const double total = xs.back() - xs.front();
  DenseVector out = DenseVector::Zero(static_cast<Eigen::Index>(tmap.multiplier_dofs.size()));
  for (std::size_t e = 0; e + 1 < xs.size(); ++e) {
    const double a = xs[e];
    const double b = xs[e + 1];
    const double len = b - a;
    const double etol = tol * len / total;
    if (tmap.interior[e]) {
      auto left = [&](double x) { return g(x) * dual_shape_values((x - a) / len).first; };
      out[static_cast<Eigen::Index>(e) - 1] += quad::integrate_adaptive(left, a, b, breaks, etol).value;
    }
    if (tmap.interior[e + 1]) {
      auto right = [&](double x) { return g(x) * dual_shape_values((x - a) / len).second; };
      out[static_cast<Eigen::Index>(e)] += quad::integrate_adaptive(right, a, b, breaks, etol).value;
    }
  }
  return out;
}

}  // namespace signorini
