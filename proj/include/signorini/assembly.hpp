#pragma once

#include <array>
#include <concepts>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "signorini/linalg.hpp"
#include "signorini/manufactured.hpp"
#include "signorini/mesh.hpp"
#include "signorini/quadrature.hpp"

namespace signorini {

/// Nodal P1 coefficients on a mesh.
struct FeFunction {
  int level = 0;
  DenseVector coeffs;
};

inline quad::Triangle triangle_of(const TriMesh& mesh, std::size_t t) {
  const auto& [i, j, k] = mesh.triangles[t];
  return {mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]};
}

/// Barycentric coordinates of `p` with respect to `tri`.
inline std::array<double, 3> barycentric(const quad::Triangle& tri, Point2 p) {
  const double det = (tri.b.x - tri.a.x) * (tri.c.y - tri.a.y) - (tri.c.x - tri.a.x) * (tri.b.y - tri.a.y);
  const double l1 = ((p.x - tri.a.x) * (tri.c.y - tri.a.y) - (tri.c.x - tri.a.x) * (p.y - tri.a.y)) / det;
  const double l2 = ((tri.b.x - tri.a.x) * (p.y - tri.a.y) - (p.x - tri.a.x) * (tri.b.y - tri.a.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

/// Gradients of the three barycentric functions (constant on the triangle).
inline std::array<Gradient, 3> hat_gradients(const quad::Triangle& tri) {
  const double det = (tri.b.x - tri.a.x) * (tri.c.y - tri.a.y) - (tri.c.x - tri.a.x) * (tri.b.y - tri.a.y);
  return {Gradient{(tri.b.y - tri.c.y) / det, (tri.c.x - tri.b.x) / det},
          Gradient{(tri.c.y - tri.a.y) / det, (tri.a.x - tri.c.x) / det},
          Gradient{(tri.a.y - tri.b.y) / det, (tri.b.x - tri.a.x) / det}};
}

/// Element stiffness of a single triangle.
inline std::array<std::array<double, 3>, 3> local_stiffness(const quad::Triangle& tri) {
  const auto g = hat_gradients(tri);
  const double area = tri.area();
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k[i][j] = area * (g[i].dx * g[j].dx + g[i].dy * g[j].dy);
  }
  return k;
}

/// Exact P1 stiffness matrix over all vertices (no boundary conditions).
inline SparseSymMatrix assemble_stiffness(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto k = local_stiffness(triangle_of(mesh, t));
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], k[i][j]);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  SparseSymMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

enum class VolumeRule { Degree4, Degree7 };

struct LoadOptions {
  VolumeRule rule = VolumeRule::Degree4;
  /// Quadrisect triangles within `near_factor * h` of a singular point once.
  bool refine_near = true;
  double near_factor = 2.0;
  std::vector<Point2> singular_points{{ExactSolution::x_l, 0.0}, {ExactSolution::x_r, 0.0}};
  /// Vertical lines across which f may jump; triangles are split there.
  std::vector<double> vertical_breaks;
  /// For the manufactured load: use the cut-off knot lines as breaks.
  bool split_kinks = true;
};

/// Load vector entries int f phi_i.
template <class F>
  requires std::invocable<F&, double, double>
DenseVector assemble_load(const TriMesh& mesh, F&& f, const LoadOptions& opts = {}) {
  const auto& rule = opts.rule == VolumeRule::Degree4 ? quad::degree4() : quad::degree7();
  const double radius = opts.near_factor * mesh.max_edge_length();
  DenseVector load = DenseVector::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));

  struct Local {
    std::array<double, 3> v{};
    Local& operator+=(const Local& o) {
      for (int i = 0; i < 3; ++i) v[i] += o.v[i];
      return *this;
    }
    Local operator*(double s) const {
      Local r = *this;
      for (double& x : r.v) x *= s;
      return r;
    }
  };

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const quad::Triangle tri = triangle_of(mesh, t);
    auto integrand = [&](Point2 p) {
      const auto l = barycentric(tri, p);
      const double fv = f(p.x, p.y);
      return Local{{fv * l[0], fv * l[1], fv * l[2]}};
    };
    bool near = false;
    if (opts.refine_near) {
      for (const auto& s : opts.singular_points) near = near || quad::distance(tri, s) <= radius;
    }
    Local contrib{};
    for (const auto& piece : quad::split_vertical(tri, opts.vertical_breaks)) {
      contrib += near ? quad::integrate_uniform<Local>(piece, rule, 1, integrand)
                      : quad::integrate<Local>(piece, rule, integrand);
    }
    const auto& idx = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) load[idx[i]] += contrib.v[i];
  }
  return load;
}

inline DenseVector assemble_load(const TriMesh& mesh, const ExactSolution& sol, LoadOptions opts = {}) {
  if (opts.split_kinks && opts.vertical_breaks.empty()) {
    const auto kinks = sol.cutoff_kinks();
    opts.vertical_breaks.assign(kinks.begin(), kinks.end());
  }
  return assemble_load(mesh, [&sol](double x, double y) { return sol.f(x, y); }, opts);
}

/// Nodal interpolant of `g` over all vertices.
template <class G>
DenseVector interpolate(const TriMesh& mesh, G&& g) {
  DenseVector v(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) v[i] = g(mesh.vertices[i].x, mesh.vertices[i].y);
  return v;
}

/// d_j = <phi_j, 1> on the Signorini boundary for each multiplier DOF.
inline DenseVector boundary_lumped_mass(const TriMesh& mesh, const TraceMap& tmap) {
  const auto xs = trace_coordinates(mesh, tmap);
  DenseVector d(static_cast<Eigen::Index>(tmap.multiplier_dofs.size()));
  Eigen::Index j = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!tmap.interior[k]) continue;
    d[j++] = 0.5 * (xs[k + 1] - xs[k - 1]);
  }
  return d;
}

struct TraceGrams {
  SparseSymMatrix mass;  // L2 Gram
  SparseSymMatrix h1;    // mass + stiffness
};

/// 1D P1 Gram matrices over the node coordinates `xs` (sorted, endpoints
/// included).
inline TraceGrams trace_grams(std::span<const double> xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  std::vector<Eigen::Triplet<double>> m;
  std::vector<Eigen::Triplet<double>> h;
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    const double len = xs[e + 1] - xs[e];
    const double md = len / 3.0;
    const double mo = len / 6.0;
    const double kd = 1.0 / len;
    m.emplace_back(e, e, md);
    m.emplace_back(e + 1, e + 1, md);
    m.emplace_back(e, e + 1, mo);
    m.emplace_back(e + 1, e, mo);
    h.emplace_back(e, e, md + kd);
    h.emplace_back(e + 1, e + 1, md + kd);
    h.emplace_back(e, e + 1, mo - kd);
    h.emplace_back(e + 1, e, mo - kd);
  }
  TraceGrams g{SparseSymMatrix(n, n), SparseSymMatrix(n, n)};
  g.mass.setFromTriplets(m.begin(), m.end());
  g.h1.setFromTriplets(h.begin(), h.end());
  return g;
}

inline TraceGrams trace_grams(const TriMesh& mesh, const TraceMap& tmap) {
  const auto xs = trace_coordinates(mesh, tmap);
  return trace_grams(std::span<const double>(xs));
}

}  // namespace signorini
