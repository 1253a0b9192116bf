#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "signorini/error.hpp"
#include "signorini/mesh.hpp"

namespace signorini {

/// C^1 quartic cut-off: 1 on (-inf, s0], 0 on [s1, inf). On [s0, s1] it is
/// the unique quartic with value 1 and vanishing first and second derivative
/// at s0, and value 0 and vanishing first derivative at s1.
class CutoffSpline {
 public:
  CutoffSpline(double s0 = 0.5, double s1 = 1.0) : s0_(s0), s1_(s1) {
    if (!(s0 > 0.0 && s0 < s1)) throw Error("cut-off knots must satisfy 0 < s0 < s1");
  }

  [[nodiscard]] double s0() const { return s0_; }
  [[nodiscard]] double s1() const { return s1_; }

  // In t = (s - s0) / (s1 - s0) the quartic reads 1 - 4 t^3 + 3 t^4.
  [[nodiscard]] double value(double s) const {
    if (s <= s0_) return 1.0;
    if (s >= s1_) return 0.0;
    const double t = (s - s0_) / (s1_ - s0_);
    return 1.0 + t * t * t * (3.0 * t - 4.0);
  }

  [[nodiscard]] double d1(double s) const {
    if (s <= s0_ || s >= s1_) return 0.0;
    const double w = s1_ - s0_;
    const double t = (s - s0_) / w;
    return 12.0 * t * t * (t - 1.0) / w;
  }

  /// One-sided at s1 (the quartic's limit is taken on [s0, s1)).
  [[nodiscard]] double d2(double s) const {
    if (s <= s0_ || s >= s1_) return 0.0;
    const double w = s1_ - s0_;
    const double t = (s - s0_) / w;
    return (36.0 * t * t - 24.0 * t) / (w * w);
  }

  /// Monomial coefficients c0..c4 of the quartic in the variable s.
  [[nodiscard]] std::array<double, 5> coefficients() const {
    // Expand 1 - 4 t^3 + 3 t^4 with t = (s - s0) / w.
    const double w = s1_ - s0_;
    const double a = -s0_ / w;
    const double b = 1.0 / w;
    // t^k = (a + b s)^k
    auto binom = [](int n, int k) {
      double r = 1.0;
      for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
      return r;
    };
    std::array<double, 5> c{1.0, 0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k <= 3; ++k) {
      c[k] += -4.0 * binom(3, k) * std::pow(a, 3 - k) * std::pow(b, k);
    }
    for (int k = 0; k <= 4; ++k) {
      c[k] += 3.0 * binom(4, k) * std::pow(a, 4 - k) * std::pow(b, k);
    }
    return c;
  }

 private:
  double s0_;
  double s1_;
};

/// r^{3/2} sin(3/2 theta).
inline double u_sing(double r, double theta) {
  if (r <= 0.0) return 0.0;
  return r * std::sqrt(r) * std::sin(1.5 * theta);
}

struct Gradient {
  double dx = 0.0;
  double dy = 0.0;
};

/// Manufactured Signorini solution on (0, Lx) x (0, 0.5):
///   u = (S(x - xl, y) cut(x) + a S(xr - x, y) cut(1.4 - x)) (1 - y^2)
/// with S the r^{3/2} singular function. Contact set is [xl, xr], obstacle 0.
class ExactSolution {
 public:
  explicit ExactSolution(double weight = 0.7, CutoffSpline cutoff = CutoffSpline{})
      : weight_(weight), cutoff_(cutoff) {}

  static constexpr double x_l = 0.2 + 0.3 / std::numbers::pi;
  static constexpr double x_r = 1.2 - 0.3 / std::numbers::pi;
  /// Reflection point of the second cut-off argument.
  static constexpr double kReflect = 1.4;

  [[nodiscard]] double weight() const { return weight_; }
  [[nodiscard]] const CutoffSpline& cutoff() const { return cutoff_; }
  [[nodiscard]] double width() const { return kDomainWidth; }

  [[nodiscard]] double u(double x, double y) const {
    double value = 0.0;
    for (const Term& t : terms()) {
      const Singular s = singular(t, x, y);
      value += t.weight * s.value * cutoff_.value(t.cut_arg(x));
    }
    return value * (1.0 - y * y);
  }

  [[nodiscard]] Gradient grad_u(double x, double y) const {
    Gradient g;
    const double yf = 1.0 - y * y;
    for (const Term& t : terms()) {
      const Singular s = singular(t, x, y);
      const double xi = t.cut_arg(x);
      const double c = cutoff_.value(xi) * yf;
      const double cx = cutoff_.d1(xi) * t.cut_slope * yf;
      const double cy = -2.0 * y * cutoff_.value(xi);
      g.dx += t.weight * (c * s.dx + s.value * cx);
      g.dy += t.weight * (c * s.dy + s.value * cy);
    }
    return g;
  }

  /// f = -Laplace(u). Each singular factor is harmonic, so only
  /// S * Laplace(C) + 2 grad S . grad C remains per term.
  [[nodiscard]] double f(double x, double y) const {
    double lap = 0.0;
    const double yf = 1.0 - y * y;
    for (const Term& t : terms()) {
      const Singular s = singular(t, x, y);
      const double xi = t.cut_arg(x);
      const double k = cutoff_.value(xi);
      const double cx = cutoff_.d1(xi) * t.cut_slope * yf;
      const double cy = -2.0 * y * k;
      const double lap_c = cutoff_.d2(xi) * yf - 2.0 * k;
      lap += t.weight * (s.value * lap_c + 2.0 * (s.dx * cx + s.dy * cy));
    }
    return -lap;
  }

  /// Multiplier lambda = -d_n u = d_y u on y = 0 (outer normal (0, -1)).
  [[nodiscard]] double lambda(double x) const { return grad_u(x, 0.0).dy; }

  /// Abscissae where the cut-off factors switch pieces; f jumps across
  /// the lines through the outer knots.
  [[nodiscard]] std::array<double, 4> cutoff_kinks() const {
    return {cutoff_.s0(), cutoff_.s1(), kReflect - cutoff_.s1(), kReflect - cutoff_.s0()};
  }

  /// Obstacle on the Signorini boundary.
  [[nodiscard]] static double gap(double /*x*/) { return 0.0; }

 private:
  struct Term {
    double center;
    double orientation;  // +1: local X = x - center, -1: X = center - x
    double weight;
    double cut_offset;   // cut-off argument = cut_offset + cut_slope * x
    double cut_slope;
    [[nodiscard]] double cut_arg(double x) const { return cut_offset + cut_slope * x; }
  };

  struct Singular {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
  };

  [[nodiscard]] std::array<Term, 2> terms() const {
    return {Term{x_l, 1.0, 1.0, 0.0, 1.0}, Term{x_r, -1.0, weight_, kReflect, -1.0}};
  }

  // For Im z^{3/2}: d/dX = 1.5 r^{1/2} sin(theta/2), d/dY = 1.5 r^{1/2} cos(theta/2).
  static Singular singular(const Term& t, double x, double y) {
    const double lx = t.orientation * (x - t.center);
    y = (y == 0.0) ? 0.0 : y;  // atan2(-0, X < 0) would give -pi
    const double r = std::hypot(lx, y);
    if (r == 0.0) return {};
    const double sr = std::sqrt(r);
    Singular s;
    if (y == 0.0 && lx < 0.0) {
      // theta = pi: closed form, avoids cos(pi / 2) round-off
      s.value = -r * sr;
      s.dx = t.orientation * 1.5 * sr;
      return s;
    }
    const double theta = std::atan2(y, lx);
    s.value = r * sr * std::sin(1.5 * theta);
    const double dX = 1.5 * sr * std::sin(0.5 * theta);
    s.dy = 1.5 * sr * std::cos(0.5 * theta);
    s.dx = t.orientation * dX;
    return s;
  }

  double weight_;
  CutoffSpline cutoff_;
};

}  // namespace signorini
