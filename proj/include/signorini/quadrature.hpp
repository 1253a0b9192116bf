#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "signorini/mesh.hpp"

namespace signorini::quad {

/// Point of a triangle rule in barycentric coordinates; weights sum to 1
/// (multiply by the triangle area).
struct TriPoint {
  double l0;
  double l1;
  double l2;
  double w;
};

namespace detail {

inline std::vector<TriPoint> expand(std::span<const std::array<double, 4>> orbits) {
  // Each orbit row: {w, a, b, c}; a == b == c is the centroid, a != b == c a
  // 3-orbit, otherwise the 6 permutations.
  std::vector<TriPoint> pts;
  for (const auto& [w, a, b, c] : orbits) {
    if (a == b && b == c) {
      pts.push_back({a, b, c, w});
    } else if (b == c) {
      pts.push_back({a, b, c, w});
      pts.push_back({b, a, c, w});
      pts.push_back({b, c, a, w});
    } else {
      pts.push_back({a, b, c, w});
      pts.push_back({a, c, b, w});
      pts.push_back({b, a, c, w});
      pts.push_back({b, c, a, w});
      pts.push_back({c, a, b, w});
      pts.push_back({c, b, a, w});
    }
  }
  return pts;
}

}  // namespace detail

/// Symmetric 6-point rule, exact for degree 4 (Dunavant).
inline const std::vector<TriPoint>& degree4() {
  static const std::vector<TriPoint> rule = [] {
    const std::array<std::array<double, 4>, 2> orbits{{
        {0.223381589678011, 0.108103018168070, 0.445948490915965, 0.445948490915965},
        {0.109951743655322, 0.816847572980459, 0.091576213509771, 0.091576213509771},
    }};
    return detail::expand(orbits);
  }();
  return rule;
}

/// Symmetric 13-point rule, exact for degree 7 (Dunavant; one negative weight).
inline const std::vector<TriPoint>& degree7() {
  static const std::vector<TriPoint> rule = [] {
    constexpr double third = 1.0 / 3.0;
    const std::array<std::array<double, 4>, 4> orbits{{
        {-0.149570044467682, third, third, third},
        {0.175615257433208, 0.479308067841920, 0.260345966079040, 0.260345966079040},
        {0.053347235608838, 0.869739794195568, 0.065130102902216, 0.065130102902216},
        {0.077113760890257, 0.048690315425316, 0.312865496004874, 0.638444188569810},
    }};
    return detail::expand(orbits);
  }();
  return rule;
}

struct Triangle {
  Point2 a;
  Point2 b;
  Point2 c;

  [[nodiscard]] double area() const {
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }
  [[nodiscard]] Point2 at(double l0, double l1, double l2) const {
    return {l0 * a.x + l1 * b.x + l2 * c.x, l0 * a.y + l1 * b.y + l2 * c.y};
  }
  [[nodiscard]] std::array<Triangle, 4> children() const {
    const Point2 ab{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const Point2 bc{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)};
    const Point2 ca{0.5 * (c.x + a.x), 0.5 * (c.y + a.y)};
    return {Triangle{a, ab, ca}, Triangle{ab, b, bc}, Triangle{ca, bc, c}, Triangle{ab, bc, ca}};
  }
};

/// Applies `rule` on `tri`; `f` maps a Point2 to a value type supporting
/// `+=` and scalar `*` (double, or a small array-like struct).
template <class Value, class F>
Value integrate(const Triangle& tri, const std::vector<TriPoint>& rule, F&& f) {
  Value sum{};
  const double area = tri.area();
  for (const auto& q : rule) {
    sum += f(tri.at(q.l0, q.l1, q.l2)) * (q.w * area);
  }
  return sum;
}

/// Rule applied on all 4^depth leaves of uniform quadrisection.
template <class Value, class F>
Value integrate_uniform(const Triangle& tri, const std::vector<TriPoint>& rule, int depth, F&& f) {
  if (depth <= 0) return integrate<Value>(tri, rule, f);
  Value sum{};
  for (const auto& child : tri.children()) sum += integrate_uniform<Value>(child, rule, depth - 1, f);
  return sum;
}

/// Splits `tri` along the vertical lines x = c for every c in `cuts` that
/// crosses its interior. The pieces tile the triangle.
inline std::vector<Triangle> split_vertical(const Triangle& tri, std::span<const double> cuts) {
  std::vector<Triangle> pieces{tri};
  for (double c : cuts) {
    std::vector<Triangle> next;
    for (const Triangle& t : pieces) {
      const std::array<Point2, 3> v{t.a, t.b, t.c};
      const double lo = std::min({v[0].x, v[1].x, v[2].x});
      const double hi = std::max({v[0].x, v[1].x, v[2].x});
      if (!(c > lo && c < hi)) {
        next.push_back(t);
        continue;
      }
      // Exactly one vertex lies strictly on one side of the line (or one
      // vertex sits on it).
      auto side = [c](Point2 p) { return p.x < c ? -1 : (p.x > c ? 1 : 0); };
      int lone = -1;
      for (int i = 0; i < 3; ++i) {
        const int si = side(v[i]);
        const int sj = side(v[(i + 1) % 3]);
        const int sk = side(v[(i + 2) % 3]);
        if (si != 0 && si != sj && si != sk) lone = i;
      }
      const Point2 p = v[lone];
      const Point2 q = v[(lone + 1) % 3];
      const Point2 r = v[(lone + 2) % 3];
      auto hit = [c](Point2 u, Point2 w) {
        const double s = (c - u.x) / (w.x - u.x);
        return Point2{c, u.y + s * (w.y - u.y)};
      };
      if (side(q) == 0) {
        const Point2 m = hit(p, r);
        next.push_back({p, q, m});
        next.push_back({m, q, r});
      } else if (side(r) == 0) {
        const Point2 m = hit(p, q);
        next.push_back({p, m, r});
        next.push_back({m, q, r});
      } else {
        const Point2 mq = hit(p, q);
        const Point2 mr = hit(p, r);
        next.push_back({p, mq, mr});
        next.push_back({mq, q, r});
        next.push_back({mq, r, mr});
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

/// Point-to-triangle distance (0 inside).
inline double distance(const Triangle& tri, Point2 p) {
  auto cross = [](Point2 o, Point2 u, Point2 v) {
    return (u.x - o.x) * (v.y - o.y) - (v.x - o.x) * (u.y - o.y);
  };
  const double d0 = cross(tri.a, tri.b, p);
  const double d1 = cross(tri.b, tri.c, p);
  const double d2 = cross(tri.c, tri.a, p);
  const bool neg = d0 < 0 || d1 < 0 || d2 < 0;
  const bool pos = d0 > 0 || d1 > 0 || d2 > 0;
  if (!(neg && pos)) return 0.0;
  auto seg = [&](Point2 u, Point2 v) {
    const double lx = v.x - u.x;
    const double ly = v.y - u.y;
    double t = ((p.x - u.x) * lx + (p.y - u.y) * ly) / (lx * lx + ly * ly);
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (u.x + t * lx), p.y - (u.y + t * ly));
  };
  return std::min({seg(tri.a, tri.b), seg(tri.b, tri.c), seg(tri.c, tri.a)});
}

/// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
struct GaussKronrod15 {
  static constexpr std::array<double, 8> xk{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

template <class F>
std::pair<double, double> gk15(F& f, double a, double b) {
  using GK = GaussKronrod15;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * GK::wk[7];
  double gauss = fc * GK::wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * GK::xk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += GK::wk[j] * fsum;
    if (j % 2 == 1) gauss += GK::wg[j / 2] * fsum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <class F>
void adapt(F& f, double a, double b, double tol, int depth, AdaptiveResult& out) {
  const auto [value, err] = gk15(f, a, b);
  if (err <= tol || depth <= 0) {
    out.value += value;
    out.error += err;
    ++out.intervals;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth - 1, out);
  adapt(f, m, b, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Recursive-bisection Gauss-Kronrod on [a, b] to absolute tolerance `tol`.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 40) {
  AdaptiveResult out;
  if (b <= a) return out;
  detail::adapt(f, a, b, tol, max_depth, out);
  return out;
}

/// Same, with forced break points inside (a, b) (kinks of the integrand).
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, std::span<const double> breaks, double tol,
                                  int max_depth = 40) {
  std::vector<double> cuts{a};
  for (double s : breaks) {
    if (s > a && s < b) cuts.push_back(s);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  AdaptiveResult out;
  const double len = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto part = integrate_adaptive(f, cuts[i], cuts[i + 1], tol * (cuts[i + 1] - cuts[i]) / len,
                                         max_depth);
    out.value += part.value;
    out.error += part.error;
    out.intervals += part.intervals;
  }
  return out;
}

}  // namespace signorini::quad
