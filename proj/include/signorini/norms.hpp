#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "signorini/assembly.hpp"
#include "signorini/biortho.hpp"
#include "signorini/linalg.hpp"
#include "signorini/manufactured.hpp"
#include "signorini/mesh.hpp"
#include "signorini/quadrature.hpp"
#include "signorini/steklov.hpp"

namespace signorini {

struct ErrorReport {
  int level = 0;
  double e_L2_omega = 0.0;
  double e_H1_omega = 0.0;  // seminorm
  double e_L2_gammaS = 0.0;
  double e_H1_gammaS = 0.0;
  double e_Hhalf_gammaS = 0.0;
  double e_L2_lambda = 0.0;
  double e_Hminus1_lambda = 0.0;
  double e_Hminushalf_lambda = 0.0;
  double e_L2_lambda_tilde = 0.0;
  double e_Hminus1_lambda_tilde = 0.0;
  double e_Hminushalf_lambda_tilde = 0.0;
};

struct VolumeQuadrature {
  double near_factor = 4.0;  // adaptive within near_factor * h of a singular point
  int max_depth = 6;
  double tolerance = 1e-16;  // absolute, distributed by area
  std::vector<Point2> singular_points{{ExactSolution::x_l, 0.0}, {ExactSolution::x_r, 0.0}};
  /// When >= 0, every triangle uses uniform quadrisection of this depth.
  int uniform_depth = -1;
  /// Split triangles along the cut-off knot lines of the exact solution.
  bool split_kinks = true;
};

struct VolumeErrors {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

namespace detail {

struct ErrPair {
  double l2 = 0.0;
  double h1 = 0.0;
  ErrPair& operator+=(const ErrPair& o) {
    l2 += o.l2;
    h1 += o.h1;
    return *this;
  }
  ErrPair operator*(double s) const { return {l2 * s, h1 * s}; }
};

template <class F>
ErrPair adaptive_triangle(const quad::Triangle& tri, F& f, double tol_per_area, int depth) {
  const ErrPair coarse = quad::integrate<ErrPair>(tri, quad::degree4(), f);
  ErrPair fine{};
  const auto kids = tri.children();
  for (const auto& k : kids) fine += quad::integrate<ErrPair>(k, quad::degree4(), f);
  const double tol = tol_per_area * tri.area();
  if (depth <= 1 || (std::abs(fine.l2 - coarse.l2) <= tol && std::abs(fine.h1 - coarse.h1) <= tol)) {
    return fine;
  }
  ErrPair sum{};
  for (const auto& k : kids) sum += adaptive_triangle(k, f, tol_per_area, depth - 1);
  return sum;
}

}  // namespace detail

/// ||u - u_h||_{L2(Omega)} and |u - u_h|_{H1(Omega)} for nodal coefficients
/// `uh` over all vertices, against the field `u` with gradient `grad_u`.
/// Triangles are cut along the vertical lines `breaks`.
template <class U, class GradU>
VolumeErrors volume_errors(const TriMesh& mesh, const DenseVector& uh, U&& u, GradU&& grad_u,
                           std::span<const double> breaks, const VolumeQuadrature& opts = {}) {
  const double radius = opts.near_factor * mesh.max_edge_length();
  const double domain_area = kDomainWidth * kDomainHeight;
  detail::ErrPair total{};
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const quad::Triangle tri = triangle_of(mesh, t);
    const auto& idx = mesh.triangles[t];
    const auto grads = hat_gradients(tri);
    Gradient guh;
    for (int i = 0; i < 3; ++i) {
      guh.dx += uh[idx[i]] * grads[i].dx;
      guh.dy += uh[idx[i]] * grads[i].dy;
    }
    auto integrand = [&](Point2 p) {
      const auto l = barycentric(tri, p);
      const double vh = l[0] * uh[idx[0]] + l[1] * uh[idx[1]] + l[2] * uh[idx[2]];
      const double e = u(p.x, p.y) - vh;
      const Gradient g = grad_u(p.x, p.y);
      const double ex = g.dx - guh.dx;
      const double ey = g.dy - guh.dy;
      return detail::ErrPair{e * e, ex * ex + ey * ey};
    };
    bool near = false;
    for (const auto& s : opts.singular_points) near = near || quad::distance(tri, s) <= radius;
    for (const auto& piece : quad::split_vertical(tri, breaks)) {
      if (opts.uniform_depth >= 0) {
        total += quad::integrate_uniform<detail::ErrPair>(piece, quad::degree4(), opts.uniform_depth, integrand);
      } else if (near && opts.max_depth > 0) {
        total += detail::adaptive_triangle(piece, integrand, opts.tolerance / domain_area, opts.max_depth);
      } else {
        total += quad::integrate<detail::ErrPair>(piece, quad::degree4(), integrand);
      }
    }
  }
  return {std::sqrt(total.l2), std::sqrt(total.h1)};
}

inline VolumeErrors volume_errors(const TriMesh& mesh, const DenseVector& uh, const ExactSolution& sol,
                                  const VolumeQuadrature& opts = {}) {
  std::vector<double> breaks;
  if (opts.split_kinks) {
    const auto kinks = sol.cutoff_kinks();
    breaks.assign(kinks.begin(), kinks.end());
  }
  return volume_errors(
      mesh, uh, [&sol](double x, double y) { return sol.u(x, y); },
      [&sol](double x, double y) { return sol.grad_u(x, y); }, breaks, opts);
}

struct TraceErrors {
  double l2 = 0.0;
  double h1 = 0.0;     // full H1(Gamma_S) norm
  double hhalf = 0.0;  // sqrt(h1 * l2)
};

/// Interpolation surrogate for fractional norms: sqrt(a * b).
inline double geometric_mean(double a, double b) { return std::sqrt(a * b); }

/// Errors of the trace of `uh` on the Signorini boundary against the trace
/// `g` with tangential derivative `dg`, splitting quadrature at `breaks`.
template <class G, class DG>
TraceErrors trace_errors(const TriMesh& mesh, const TraceMap& tmap, const DenseVector& uh, G&& g, DG&& dg,
                         std::span<const double> breaks, double tol = 1e-15) {
  const auto xs = trace_coordinates(mesh, tmap);
  const double total = xs.back() - xs.front();
  double l2 = 0.0;
  double semi = 0.0;
  for (std::size_t e = 0; e + 1 < xs.size(); ++e) {
    const double a = xs[e];
    const double b = xs[e + 1];
    const double ua = uh[tmap.signorini_vertices[e]];
    const double ub = uh[tmap.signorini_vertices[e + 1]];
    const double slope = (ub - ua) / (b - a);
    const double etol = tol * (b - a) / total;
    auto val = [&](double x) {
      const double d = g(x) - (ua + slope * (x - a));
      return d * d;
    };
    auto der = [&](double x) {
      const double d = dg(x) - slope;
      return d * d;
    };
    l2 += quad::integrate_adaptive(val, a, b, breaks, etol).value;
    semi += quad::integrate_adaptive(der, a, b, breaks, etol).value;
  }
  TraceErrors out;
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(l2 + semi);
  out.hhalf = geometric_mean(out.h1, out.l2);
  return out;
}

inline TraceErrors trace_errors(const TriMesh& mesh, const TraceMap& tmap, const DenseVector& uh,
                                const ExactSolution& sol, double tol = 1e-15) {
  const auto breaks = trace_breakpoints(sol);
  return trace_errors(
      mesh, tmap, uh, [&sol](double x) { return sol.u(x, 0.0); },
      [&sol](double x) { return sol.grad_u(x, 0.0).dx; }, breaks, tol);
}

/// ||lambda - lambda_hat||_{L2(Gamma_S)} for nodal multiplier values on the
/// trace vertices.
inline double multiplier_l2_error(std::span<const double> xs, std::span<const double> nodal,
                                  const ExactSolution& sol, double tol = 1e-15) {
  const auto breaks = trace_breakpoints(sol);
  const double total = xs.back() - xs.front();
  double sum = 0.0;
  for (std::size_t e = 0; e + 1 < xs.size(); ++e) {
    const double a = xs[e];
    const double b = xs[e + 1];
    const double slope = (nodal[e + 1] - nodal[e]) / (b - a);
    auto err = [&](double x) {
      const double d = sol.lambda(x) - (nodal[e] + slope * (x - a));
      return d * d;
    };
    sum += quad::integrate_adaptive(err, a, b, breaks, tol * (b - a) / total).value;
  }
  return std::sqrt(sum);
}

/// Uniform node coordinates of the Signorini boundary at mesh level `level`.
inline std::vector<double> uniform_trace_nodes(int level) {
  const int n = 4 << (level - 1);
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) xs[static_cast<std::size_t>(i)] = kDomainWidth * i / n;
  xs.back() = kDomainWidth;
  return xs;
}

/// Discrete H^{-1}(Gamma_S) norm as the dual norm of a fine P1 trace space:
/// sup_w int e w / ||w||_{H1}, evaluated as sqrt(r^T H^{-1} r) with
/// r_i = int e phi_i (r = M e for P1 data).
class DualNormEvaluator {
 public:
  explicit DualNormEvaluator(int reference_level)
      : level_(reference_level), xs_(uniform_trace_nodes(reference_level)), grams_(trace_grams(xs_)) {
    chol_.factorize(grams_.h1);
  }

  DualNormEvaluator(const DualNormEvaluator&) = delete;
  DualNormEvaluator& operator=(const DualNormEvaluator&) = delete;

  [[nodiscard]] int level() const { return level_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return xs_; }

  /// Dual norm of the P1 function with nodal values `e` on nodes().
  [[nodiscard]] double operator()(const DenseVector& e) const {
    if (e.size() != static_cast<Eigen::Index>(xs_.size())) throw Error("dual norm: size mismatch");
    const DenseVector r = grams_.mass * e;
    const DenseVector y = chol_.solve(r);
    return std::sqrt(std::max(0.0, r.dot(y)));
  }

  /// Error between a coarse nodal trace function (prolongated by linear
  /// interpolation) and the exact multiplier, tested against the reference
  /// space: r_i = int (coarse - lambda) phi_i with exact moments of lambda.
  [[nodiscard]] double lambda_error(std::span<const double> coarse_xs, std::span<const double> coarse_nodal,
                                    const ExactSolution& sol, double tol = 1e-15) const {
    DenseVector coarse(static_cast<Eigen::Index>(xs_.size()));
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      coarse[static_cast<Eigen::Index>(i)] = evaluate_trace(coarse_xs, coarse_nodal, xs_[i]);
    }
    const DenseVector r = grams_.mass * coarse - moments(sol, tol);
    const DenseVector y = chol_.solve(r);
    return std::sqrt(std::max(0.0, r.dot(y)));
  }

  /// int lambda phi_i over the reference hat functions.
  [[nodiscard]] DenseVector moments(const ExactSolution& sol, double tol = 1e-15) const {
    const auto breaks = trace_breakpoints(sol);
    const double total = xs_.back() - xs_.front();
    DenseVector b = DenseVector::Zero(static_cast<Eigen::Index>(xs_.size()));
    for (std::size_t e = 0; e + 1 < xs_.size(); ++e) {
      const double a = xs_[e];
      const double c = xs_[e + 1];
      const double len = c - a;
      const double etol = tol * len / total;
      auto left = [&](double x) { return sol.lambda(x) * (c - x) / len; };
      auto right = [&](double x) { return sol.lambda(x) * (x - a) / len; };
      b[static_cast<Eigen::Index>(e)] += quad::integrate_adaptive(left, a, c, breaks, etol).value;
      b[static_cast<Eigen::Index>(e + 1)] += quad::integrate_adaptive(right, a, c, breaks, etol).value;
    }
    return b;
  }

 private:
  int level_;
  std::vector<double> xs_;
  TraceGrams grams_;
  CholeskySolver chol_;
};

}  // namespace signorini
