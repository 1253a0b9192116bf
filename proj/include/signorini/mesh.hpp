#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "signorini/error.hpp"

namespace signorini {

/// Width of the rectangular domain (0, Lx) x (0, 0.5).
inline const double kDomainWidth = 1.4 + std::numbers::e / 2.7;
inline constexpr double kDomainHeight = 0.5;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag : std::uint8_t { Dirichlet = 0, Signorini = 1 };

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryTag tag = BoundaryTag::Dirichlet;
};

/// Lineage of a vertex with respect to the next coarser mesh. A vertex that
/// already existed has `b < 0` and `a` is its coarse index; a new vertex is
/// the midpoint of the coarse edge (a, b).
struct VertexParent {
  int a = -1;
  int b = -1;

  [[nodiscard]] bool is_coarse_vertex() const { return b < 0; }
};

struct TriMesh {
  int level = 1;
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<VertexParent> parent_map;  // empty on the initial level

  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles.size(); }

  [[nodiscard]] double signed_area(std::size_t t) const {
    const auto& [i, j, k] = triangles[t];
    const Point2& p = vertices[i];
    const Point2& q = vertices[j];
    const Point2& r = vertices[k];
    return 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
  }

  /// Longest edge over all triangles.
  [[nodiscard]] double max_edge_length() const {
    double h = 0.0;
    for (const auto& tri : triangles) {
      for (int e = 0; e < 3; ++e) {
        const Point2& p = vertices[tri[e]];
        const Point2& q = vertices[tri[(e + 1) % 3]];
        h = std::max(h, std::hypot(q.x - p.x, q.y - p.y));
      }
    }
    return h;
  }

  /// Per-vertex flag: true on the closure of the Dirichlet boundary.
  [[nodiscard]] std::vector<bool> dirichlet_vertices() const {
    std::vector<bool> flag(vertices.size(), false);
    for (const auto& e : boundary_edges) {
      if (e.tag == BoundaryTag::Dirichlet) {
        flag[e.a] = true;
        flag[e.b] = true;
      }
    }
    return flag;
  }
};

/// Ordered vertices of the Signorini boundary y = 0.
struct TraceMap {
  std::vector<int> signorini_vertices;  // sorted by x, endpoints included
  std::vector<bool> interior;           // false for the two corner vertices
  std::vector<int> multiplier_dofs;     // interior entries only

  [[nodiscard]] std::size_t num_multipliers() const { return multiplier_dofs.size(); }
};

/// Level-1 mesh: a 4x2 grid of quads, each split along the lower-left to
/// upper-right diagonal.
inline TriMesh build_initial() {
  constexpr int nx = 4;
  constexpr int ny = 2;
  TriMesh mesh;
  mesh.level = 1;
  const double dx = kDomainWidth / nx;
  const double dy = kDomainHeight / ny;
  auto id = [](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.push_back({i == nx ? kDomainWidth : i * dx, j == ny ? kDomainHeight : j * dy});
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ll = id(i, j);
      const int lr = id(i + 1, j);
      const int ul = id(i, j + 1);
      const int ur = id(i + 1, j + 1);
      mesh.triangles.push_back({ll, lr, ur});
      mesh.triangles.push_back({ll, ur, ul});
    }
  }
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::Signorini});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({id(nx, j), id(nx, j + 1), BoundaryTag::Dirichlet});
  }
  for (int i = nx; i > 0; --i) {
    mesh.boundary_edges.push_back({id(i, ny), id(i - 1, ny), BoundaryTag::Dirichlet});
  }
  for (int j = ny; j > 0; --j) {
    mesh.boundary_edges.push_back({id(0, j), id(0, j - 1), BoundaryTag::Dirichlet});
  }
  return mesh;
}

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace detail

/// Uniform red refinement: every triangle is split into four congruent
/// children through its edge midpoints. Coarse vertices keep their indices.
inline TriMesh refine(const TriMesh& coarse) {
  TriMesh fine;
  fine.level = coarse.level + 1;
  fine.vertices = coarse.vertices;
  fine.parent_map.reserve(coarse.vertices.size() * 4);
  for (int v = 0; v < static_cast<int>(coarse.vertices.size()); ++v) {
    fine.parent_map.push_back({v, -1});
  }

  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(coarse.triangles.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const Point2& p = coarse.vertices[a];
    const Point2& q = coarse.vertices[b];
    const int idx = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
    fine.parent_map.push_back({std::min(a, b), std::max(a, b)});
    midpoint.emplace(key, idx);
    return idx;
  };

  fine.triangles.reserve(coarse.triangles.size() * 4);
  for (const auto& [a, b, c] : coarse.triangles) {
    const int ab = mid(a, b);
    const int bc = mid(b, c);
    const int ca = mid(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }

  fine.boundary_edges.reserve(coarse.boundary_edges.size() * 2);
  for (const auto& e : coarse.boundary_edges) {
    const int m = midpoint.at(detail::edge_key(e.a, e.b));
    fine.boundary_edges.push_back({e.a, m, e.tag});
    fine.boundary_edges.push_back({m, e.b, e.tag});
  }
  return fine;
}

/// Mesh of the given level obtained by refining the initial mesh.
inline TriMesh build_level(int level) {
  if (level < 1) throw Error("mesh level must be >= 1, got " + std::to_string(level));
  TriMesh mesh = build_initial();
  while (mesh.level < level) mesh = refine(mesh);
  return mesh;
}

inline TraceMap trace_map(const TriMesh& mesh) {
  std::vector<bool> on_signorini(mesh.vertices.size(), false);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == BoundaryTag::Signorini) {
      on_signorini[e.a] = true;
      on_signorini[e.b] = true;
    }
  }
  const auto dirichlet = mesh.dirichlet_vertices();

  TraceMap map;
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v) {
    if (on_signorini[v]) map.signorini_vertices.push_back(v);
  }
  std::sort(map.signorini_vertices.begin(), map.signorini_vertices.end(),
            [&](int i, int j) { return mesh.vertices[i].x < mesh.vertices[j].x; });
  for (int v : map.signorini_vertices) {
    const bool inner = !dirichlet[v];
    map.interior.push_back(inner);
    if (inner) map.multiplier_dofs.push_back(v);
  }
  return map;
}

/// x-coordinates of the Signorini vertices, in trace order.
inline std::vector<double> trace_coordinates(const TriMesh& mesh, const TraceMap& tmap) {
  std::vector<double> xs;
  xs.reserve(tmap.signorini_vertices.size());
  for (int v : tmap.signorini_vertices) xs.push_back(mesh.vertices[v].x);
  return xs;
}

/// Prolongation of nodal values from the parent level to `fine`.
inline std::vector<double> prolongate(const TriMesh& fine, std::span<const double> coarse_values) {
  if (fine.parent_map.size() != fine.vertices.size()) {
    throw Error("prolongate: mesh has no parent map");
  }
  std::vector<double> out(fine.vertices.size());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const auto& p = fine.parent_map[v];
    out[v] = p.is_coarse_vertex() ? coarse_values[p.a]
                                  : 0.5 * (coarse_values[p.a] + coarse_values[p.b]);
  }
  return out;
}

/// Restriction by injection onto the parent vertices.
inline std::vector<double> restrict_to_parent(const TriMesh& fine, std::span<const double> fine_values) {
  std::size_t n_coarse = 0;
  for (const auto& p : fine.parent_map) {
    if (p.is_coarse_vertex()) n_coarse = std::max<std::size_t>(n_coarse, p.a + 1);
  }
  std::vector<double> out(n_coarse);
  for (std::size_t v = 0; v < fine.parent_map.size(); ++v) {
    const auto& p = fine.parent_map[v];
    if (p.is_coarse_vertex()) out[p.a] = fine_values[v];
  }
  return out;
}

/// Plain-text dump: `x y` per vertex, `i j k` per triangle, `i j tag` per
/// boundary edge (tag 0 = Dirichlet, 1 = Signorini). Sections are preceded by
/// a count line.
inline void write_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open mesh output file: " + path);
  out.precision(17);
  out << "vertices " << mesh.vertices.size() << '\n';
  for (const auto& p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& [i, j, k] : mesh.triangles) out << i << ' ' << j << ' ' << k << '\n';
  out << "boundary_edges " << mesh.boundary_edges.size() << '\n';
  for (const auto& e : mesh.boundary_edges) {
    out << e.a << ' ' << e.b << ' ' << static_cast<int>(e.tag) << '\n';
  }
  if (!out) throw Error("failed writing mesh file: " + path);
}

}  // namespace signorini
