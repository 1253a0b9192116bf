#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "signorini/biortho.hpp"

using namespace signorini;

namespace {

// 3-point Gauss on [0, 1].
template <class F>
double gauss01(F&& f) {
  const double a = 0.5 - 0.5 * std::sqrt(0.6);
  const double b = 0.5 + 0.5 * std::sqrt(0.6);
  return (5.0 * f(a) + 8.0 * f(0.5) + 5.0 * f(b)) / 18.0;
}

}  // namespace

TEST(DualShape, ReferenceIntegrals) {
  EXPECT_NEAR(gauss01([](double t) { return dual_shape_values(t).first * (1 - t); }), 0.5, 1e-15);
  EXPECT_NEAR(gauss01([](double t) { return 1 - t; }), 0.5, 1e-15);
  EXPECT_NEAR(gauss01([](double t) { return dual_shape_values(t).first * t; }), 0.0, 1e-15);
  EXPECT_NEAR(gauss01([](double t) { return dual_shape_values(t).second * t; }), 0.5, 1e-15);
  EXPECT_NEAR(gauss01([](double t) { return dual_shape_values(t).second * (1 - t); }), 0.0, 1e-15);
}

TEST(DualShape, PartitionOfUnity) {
  for (int i = 0; i <= 100; ++i) {
    const auto [l, r] = dual_shape_values(i / 100.0);
    EXPECT_NEAR(l + r, 1.0, 1e-15);
  }
}

TEST(Coupling, BiorthogonalityOnEveryLevel) {
  for (int k = 1; k <= 6; ++k) {
    const TriMesh m = build_level(k);
    const TraceMap t = trace_map(m);
    const Eigen::MatrixXd c = coupling_matrix(m, t);
    const DenseVector d = coupling_diagonal(m, t);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    for (Eigen::Index j = 0; j < d.size(); ++j) expected(j + 1, j) = d[j];
    EXPECT_LE((c - expected).cwiseAbs().maxCoeff(), 1e-12 * d.maxCoeff()) << "level " << k;
    EXPECT_GT(d.minCoeff(), 0.0);
  }
}

TEST(Coupling, PairingWithOne) {
  const TriMesh m = build_level(3);
  const TraceMap t = trace_map(m);
  const Eigen::MatrixXd c = coupling_matrix(m, t);
  const DenseVector d = coupling_diagonal(m, t);
  // <1, psi_j> summed over all hats, corners included.
  const DenseVector ones = DenseVector::Ones(c.rows());
  EXPECT_LE((c.transpose() * ones - d).norm(), 1e-13);
}

TEST(Multiplier, PsiValuesAndEvaluation) {
  const TriMesh m = build_level(2);
  const TraceMap t = trace_map(m);
  const auto xs = trace_coordinates(m, t);
  MultiplierFunction mu{2, DenseVector::Zero(static_cast<Eigen::Index>(t.num_multipliers()))};
  const std::size_t j = 3;  // trace vertex 4
  mu.coeffs[static_cast<Eigen::Index>(j)] = 1.0;
  for (double s : {0.0, 0.2, 0.5, 0.9}) {
    const double x = xs[3] + s * (xs[4] - xs[3]);
    EXPECT_NEAR(evaluate_multiplier(xs, t, mu, x), psi_value(xs, t, j, x), 1e-15);
    const double y = xs[4] + s * (xs[5] - xs[4]);
    EXPECT_NEAR(evaluate_multiplier(xs, t, mu, y), psi_value(xs, t, j, y), 1e-15);
  }
  EXPECT_EQ(psi_value(xs, t, j, xs[1]), 0.0);
  EXPECT_NEAR(psi_value(xs, t, j, xs[4] - 1e-12), 2.0, 1e-9);
}

TEST(Multiplier, DiscreteConeNotInContinuousCone) {
  const TriMesh m = build_level(2);
  const TraceMap t = trace_map(m);
  const auto xs = trace_coordinates(m, t);
  MultiplierFunction mu{2, DenseVector::Zero(static_cast<Eigen::Index>(t.num_multipliers()))};
  mu.coeffs[2] = 1.0;
  ASSERT_TRUE(mu.in_discrete_cone());
  // psi_j = 3t - 1 on its left element is negative for t < 1/3.
  const double x = xs[2] + 0.1 * (xs[3] - xs[2]);
  EXPECT_LT(evaluate_multiplier(xs, t, mu, x), 0.0);
  mu.coeffs[0] = -1e-3;
  EXPECT_FALSE(mu.in_discrete_cone());
  EXPECT_TRUE(mu.in_discrete_cone(1e-2));
}

TEST(LambdaHat, ZeroAndSingleCoefficient) {
  const TriMesh m = build_level(2);
  const TraceMap t = trace_map(m);
  const auto xs = trace_coordinates(m, t);
  MultiplierFunction mu{2, DenseVector::Zero(static_cast<Eigen::Index>(t.num_multipliers()))};
  for (double v : postprocess_lambda_hat(t, mu)) EXPECT_EQ(v, 0.0);
  mu.coeffs[4] = 1.0;
  const auto hat = postprocess_lambda_hat(t, mu);
  for (std::size_t k = 0; k < hat.size(); ++k) EXPECT_EQ(hat[k], k == 5 ? 1.0 : 0.0);
  EXPECT_NEAR(evaluate_trace(xs, hat, 0.5 * (xs[5] + xs[6])), 0.5, 1e-15);
}

TEST(LambdaHat, SameMeanAsMultiplier) {
  const TriMesh m = build_level(3);
  const TraceMap t = trace_map(m);
  const auto xs = trace_coordinates(m, t);
  MultiplierFunction mu{3, DenseVector::Zero(static_cast<Eigen::Index>(t.num_multipliers()))};
  for (Eigen::Index j = 2; j < mu.coeffs.size() - 2; ++j) mu.coeffs[j] = std::sin(0.7 * j) + 1.5;
  const auto hat = postprocess_lambda_hat(t, mu);
  const std::vector<double> none;
  double i_mu = 0.0;
  double i_hat = 0.0;
  for (std::size_t e = 0; e + 1 < xs.size(); ++e) {
    i_mu += quad::integrate_adaptive([&](double x) { return evaluate_multiplier(xs, t, mu, x); }, xs[e], xs[e + 1],
                                     1e-14).value;
    i_hat += quad::integrate_adaptive([&](double x) { return evaluate_trace(xs, hat, x); }, xs[e], xs[e + 1],
                                      1e-14).value;
  }
  EXPECT_NEAR(i_mu, i_hat, 1e-12);
}

TEST(DualMoments, LinearTraceGivesScaledNodalValues) {
  const TriMesh m = build_level(3);
  const TraceMap t = trace_map(m);
  const DenseVector d = coupling_diagonal(m, t);
  auto g = [](double x) { return 2.0 - 0.8 * x; };
  const std::vector<double> none;
  const DenseVector mom = dual_moments(m, t, g, none);
  for (Eigen::Index j = 0; j < mom.size(); ++j) {
    EXPECT_NEAR(mom[j], d[j] * g(m.vertices[t.multiplier_dofs[j]].x), 1e-13);
  }
}
