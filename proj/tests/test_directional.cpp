#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gchisq/directional.hpp"
#include "gchisq/error.hpp"

using namespace gchisq;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

BinghamParams params(std::initializer_list<double> th) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(th.size()));
  Eigen::Index i = 0;
  for (double v : th) t[i++] = v;
  return BinghamParams::unit(t);
}

}  // namespace

TEST(Bingham, UniformSphere) {
  EXPECT_LT(rel(bingham_const(params({2, 2, 2})), 4.0 * pi * std::exp(-2.0)), 1e-12);
  EXPECT_LT(rel(bingham_const(params({0, 0, 0})), 4.0 * pi), 1e-12);
}

TEST(Bingham, Circle) {
  // int_{S^1} exp(-x_2^2) = 2 pi e^{-1/2} I0(1/2).
  EXPECT_LT(rel(bingham_const(params({0, 1})), 2.0 * pi * std::exp(-0.5) * std::cyl_bessel_i(0.0, 0.5)), 1e-11);
}

TEST(Bingham, ShiftInvariance) {
  const double base = bingham_const(params({0.3, 1.2, 2.9}));
  for (double c : {-3.0, -0.5, 1.0, 4.0}) {
    EXPECT_LT(rel(bingham_const(params({0.3 + c, 1.2 + c, 2.9 + c})), std::exp(-c) * base), 1e-10) << c;
  }
}

TEST(Bingham, NegativeThetas) {
  EXPECT_LT(rel(bingham_const(params({-2.0, 0.5, 1.0})), std::exp(2.0) * bingham_const(params({0.0, 2.5, 3.0}))), 1e-10);
}

TEST(Bingham, PermutationInvariance) {
  const double a = bingham_const(params({0.4, 1.7, 3.1}));
  EXPECT_LT(rel(bingham_const(params({3.1, 0.4, 1.7})), a), 1e-11);
  EXPECT_LT(rel(bingham_const(params({1.7, 3.1, 0.4})), a), 1e-11);
}

TEST(Bingham, MonotoneInEachTheta) {
  double prev = bingham_const(params({0.5, 1.0, 2.0, 3.0}));
  for (double t : {3.5, 4.0, 6.0}) {
    const double c = bingham_const(params({0.5, 1.0, 2.0, t}));
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(Bingham, FastPathsMatchGeneric) {
  for (const auto& p : {params({0.2, 1.4, 2.5}), params({0.3, 0.9, 1.8, 3.3}), params({-1.0, 0.0, 0.7, 2.0})}) {
    EXPECT_LT(rel(bingham_const(p), bingham_const_generic(p)), 1e-10);
  }
}

TEST(Bingham, Multiplicities) {
  // Equal thetas in one block of multiplicity 3 behave like three unit blocks.
  BinghamParams block;
  block.theta = Eigen::Vector2d(0.5, 2.0);
  block.n = Eigen::Vector2i(3, 1);
  EXPECT_LT(rel(bingham_const(block), bingham_const(params({0.5, 0.5, 0.5, 2.0}))), 1e-10);
}

TEST(Bingham, GradientAgainstFiniteDifferences) {
  const auto p = params({0.4, 1.1, 2.3});
  const auto g = bingham_const_gradient(p, 1e-12);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    auto up = p, dn = p;
    up.theta[i] += h;
    dn.theta[i] -= h;
    const double fd = (bingham_const(up) - bingham_const(dn)) / (2.0 * h);
    EXPECT_LT(rel(g[i], fd), 1e-7) << i;
  }
  // Sum of the gradient is -C because sum |x_i|^2 = 1.
  EXPECT_LT(rel(g.sum(), -bingham_const(p)), 1e-10);
}

TEST(Bingham, InvalidInput) {
  EXPECT_THROW(bingham_const(params({1.0})), Error);
  BinghamParams bad;
  bad.theta = Eigen::Vector2d(1.0, 2.0);
  bad.n = Eigen::Vector2i(1, 0);
  EXPECT_THROW(bingham_const(bad), Error);
}

TEST(ComplexBingham, ClosedForm) {
  Eigen::Vector2d t(1.0, 2.0);
  EXPECT_LT(rel(complex_bingham_const(t), 2.0 * pi * pi * (std::exp(-1.0) - std::exp(-2.0))), 1e-14);
}

TEST(ComplexBingham, NearlyEqualLimit) {
  Eigen::Vector2d t(1.0, 1.0 + 1e-6);
  EXPECT_LT(rel(complex_bingham_const(t), 2.0 * pi * pi * std::exp(-1.0)), 1e-5);
}

TEST(ComplexBingham, AgainstDoubledReal) {
  Eigen::Vector3d t(1.0, 2.0, 4.0);
  BinghamParams doubled;
  doubled.theta = t;
  doubled.n = Eigen::Vector3i(2, 2, 2);
  EXPECT_LT(rel(complex_bingham_const(t), bingham_const(doubled)), 1e-12);
  Eigen::Vector4d u(-0.5, 0.3, 1.1, 2.6);
  BinghamParams du;
  du.theta = u;
  du.n = Eigen::Vector4i(2, 2, 2, 2);
  EXPECT_LT(rel(complex_bingham_const(u), bingham_const(du)), 1e-12);
  EXPECT_GT(complex_bingham_const(u), 0.0);
}

TEST(ComplexBingham, Duplicates) {
  Eigen::Vector2d t(1.0, 1.0);
  EXPECT_THROW(complex_bingham_const(t), Error);
}

TEST(Kent, ZeroConcentrationIsBingham) {
  for (double beta : {0.5, 1.0, 2.0}) {
    EXPECT_LT(rel(kent_const({beta, 0.0}), bingham_const(params({0.0, -beta, beta}))), 1e-10) << beta;
  }
}

TEST(Kent, RadiusInvariance) {
  for (double kappa : {0.5, 2.0, 5.0}) {
    EXPECT_LT(rel(kent_const({1.0, kappa}, 0.6), kent_const({1.0, kappa}, 0.9)), 1e-10) << kappa;
  }
}

TEST(Kent, BesselSeries) {
  // 2 pi sum_j Gamma(j + 1/2) / Gamma(j + 1) beta^{2j} (kappa/2)^{-2j-1/2} I_{2j+1/2}(kappa).
  const double beta = 1.0, kappa = 2.0;
  double ref = 0.0;
  for (int j = 0; j < 40; ++j) {
    ref += std::exp(std::lgamma(j + 0.5) - std::lgamma(j + 1.0)) * std::pow(beta, 2 * j) *
           std::pow(0.5 * kappa, -2.0 * j - 0.5) * std::cyl_bessel_i(2.0 * j + 0.5, kappa);
  }
  ref *= 2.0 * pi;
  EXPECT_LT(rel(kent_const({beta, kappa}), ref), 1e-11);
}

TEST(Kent, InvalidInput) {
  EXPECT_THROW(kent_const({0.0, 1.0}), Error);
  EXPECT_THROW(kent_const({1.0, -1.0}), Error);
  EXPECT_THROW(kent_contour_const(1.0, 0.5, 0.3), Error);
}

TEST(FisherSO3, Origin) {
  EXPECT_LT(rel(fisher_so3_const(Eigen::Vector3d::Zero()), pi * pi), 1e-12);
  EXPECT_NEAR(fisher_so3_const_normalized(Eigen::Vector3d::Zero()), 1.0, 1e-12);
  EXPECT_LT(fisher_so3_grad(Eigen::Vector3d::Zero()).norm(), 1e-10);
}

TEST(FisherSO3, Symmetries) {
  const Eigen::Vector3d phi(0.4, -1.1, 2.0);
  const double c = fisher_so3_const(phi);
  EXPECT_LT(rel(fisher_so3_const(Eigen::Vector3d(2.0, 0.4, -1.1)), c), 1e-10);
  // Rotation by pi about an axis flips the sign of two diagonal entries.
  EXPECT_LT(rel(fisher_so3_const(Eigen::Vector3d(-0.4, 1.1, 2.0)), c), 1e-10);
}

TEST(FisherSO3, GradientAgainstFiniteDifferences) {
  const Eigen::Vector3d phi(0.7, 1.3, -0.5);
  const auto g = fisher_so3_grad(phi);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d up = phi, dn = phi;
    up[i] += h;
    dn[i] -= h;
    const double fd = (std::log(fisher_so3_const(up)) - std::log(fisher_so3_const(dn))) / (2.0 * h);
    EXPECT_NEAR(g[i], fd, 1e-7) << i;
    // E[R_ii] lies in [-1, 1].
    EXPECT_LE(std::abs(g[i]), 1.0);
  }
}

TEST(FisherSO3, SmallConcentrationExpansion) {
  // E[R_11] ~ phi_1 / 3 near the uniform distribution.
  const auto g = fisher_so3_grad(Eigen::Vector3d(1e-3, 0.0, 0.0));
  EXPECT_NEAR(g[0], 1e-3 / 3.0, 1e-8);
}
