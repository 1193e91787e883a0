#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gchisq/error.hpp"
#include "gchisq/integrand.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/oracles.hpp"
#include "gchisq/qform.hpp"

using namespace gchisq;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double gamma_pdf(double theta, int n, double x) {
  // (1/(2 theta)) chi^2_n is Gamma(n/2, rate theta).
  const double k = 0.5 * n;
  return std::exp(k * std::log(theta) + (k - 1.0) * std::log(x) - theta * x - std::lgamma(k));
}

ContourOptions uncollapsed() {
  ContourOptions o;
  o.collapse_central_cuts = false;
  return o;
}

}  // namespace

TEST(Pdf, ChiSquareTwo) {
  const auto s = normalize_spec({make_term(0.5, 2)});
  EXPECT_NEAR(pdf(s, 2.0).value, 0.5 * std::exp(-1.0), 1e-15);
}

TEST(Pdf, ChiSquareOne) {
  const auto s = normalize_spec({make_term(0.5, 1)});
  EXPECT_NEAR(rel(pdf(s, 1.0).value, std::exp(-0.5) / std::sqrt(2.0 * pi)), 0.0, 1e-11);
}

TEST(Pdf, GammaFamily) {
  for (int n = 1; n <= 9; ++n) {
    for (double theta : {0.3, 1.0, 4.0}) {
      const auto s = normalize_spec({make_term(theta, n)});
      for (double x : {0.05, 0.7, 3.0}) {
        EXPECT_LT(rel(pdf(s, x).value, gamma_pdf(theta, n, x)), 1e-10) << n << " " << theta << " " << x;
      }
    }
  }
}

TEST(Pdf, TwoUnitTermsBessel) {
  // 0.5 chi^2_1 + 0.25 chi^2_1 has density e^{-3x/2} I0(x/2) * sqrt(2).
  const auto s = normalize_spec({make_term(1, 1), make_term(2, 1)});
  for (double x : {0.2, 1.0, 5.0}) {
    const double ref = std::sqrt(2.0) * std::exp(-1.5 * x) * std::cyl_bessel_i(0.0, 0.5 * x);
    EXPECT_LT(rel(pdf(s, x).value, ref), 1e-10) << x;
  }
}

TEST(Pdf, NoncentralChiSquare) {
  // chi^2_3(2) at 3.
  const auto s = normalize_spec({term_from_coefficient(1.0, 3, 2.0)});
  EXPECT_LT(rel(pdf(s, 3.0).value, 0.13310038395910714), 1e-10);
  EXPECT_LT(rel(cdf(s, 3.0).value, 0.35766818135999545), 1e-10);
  // 0.5 chi^2_1(4) at 2.
  const auto t = normalize_spec({term_from_coefficient(0.5, 1, 4.0)});
  EXPECT_LT(rel(pdf(t, 2.0).value, 0.1995380553135988), 1e-10);
}

TEST(Pdf, HypoexponentialClosedForm) {
  // Rates 1, 2, 3: density sum_i c_i e^{-r_i x}.
  const auto s = normalize_spec({make_term(1, 2), make_term(2, 2), make_term(3, 2)});
  for (double x : {0.1, 1.0, 4.0}) {
    const double ref = 6.0 * (0.5 * std::exp(-x) - std::exp(-2.0 * x) + 0.5 * std::exp(-3.0 * x));
    EXPECT_LT(rel(pdf(s, x).value, ref), 1e-12) << x;
  }
}

TEST(Pdf, NearlyDegeneratePair) {
  // Two dof-1 terms with almost equal theta behave like one chi^2_2 term.
  const auto s = normalize_spec({make_term(1.0, 1), make_term(1.0 + 1e-9, 1)});
  EXPECT_LT(rel(pdf(s, 1.3).value, std::exp(-1.3)), 1e-8);
}

TEST(Routes, SimpleAndGeneralAgree) {
  const auto s = normalize_spec({make_term(0.7, 1), make_term(1.1, 1), make_term(2.0, 1), make_term(3.5, 1)});
  ASSERT_TRUE(central_simple_applicable(s));
  for (double x : {0.3, 1.5, 6.0}) {
    const double a = pdf_central_simple(s, x, 1e-12).value;
    ContourOptions o;
    o.rel_tol = 1e-12;
    const double b = pdf_general_contour(s, x, o).value;
    auto u = uncollapsed();
    u.rel_tol = 1e-12;
    const double c = pdf_general_contour(s, x, u).value;
    EXPECT_LT(rel(a, b), 1e-10) << x;
    EXPECT_LT(rel(a, c), 1e-9) << x;
  }
}

TEST(Routes, SinAndBetaMapsAgree) {
  const std::vector<ChiSquareTerm> others{make_term(0.4, 1), make_term(3.0, 2)};
  const auto a = elementary::cut_integral_sin2(1.0, 2.0, others, 1.3, 1e-13);
  const auto b = elementary::cut_integral_beta(1.0, 2.0, others, 1.3, 1e-13);
  EXPECT_LT(rel(a.value, b.value), 1e-11);
}

TEST(Routes, DegeneratePairLimit) {
  const std::vector<ChiSquareTerm> others{make_term(0.4, 1), make_term(3.0, 2)};
  const double lim = elementary::degenerate_pair_term(1.0, others, 1.3);
  const auto near = elementary::cut_integral_sin2(1.0, 1.0 + 1e-7, others, 1.3, 1e-12);
  EXPECT_LT(rel(near.value, lim), 1e-6);
}

TEST(Routes, NoncentralAgainstImhof) {
  const auto s = normalize_spec({make_term(1, 1), make_term(3, 1, 2.0)});
  for (double x : {0.2, 0.8, 2.0, 5.0}) {
    EXPECT_NEAR(cdf(s, x).value, imhof_cdf(s, x, 1e-12), 1e-9) << x;
  }
}

TEST(Routes, CollapsedAndUncollapsedAgree) {
  const auto s = normalize_spec({make_term(0.6, 1), make_term(1.0, 2, 0.8), make_term(1.7, 3), make_term(2.4, 1, 1.2)});
  for (double x : {0.4, 2.0, 7.0}) {
    ContourOptions o;
    o.rel_tol = 1e-12;
    auto u = uncollapsed();
    u.rel_tol = 1e-12;
    EXPECT_LT(rel(pdf(s, x, o).value, pdf(s, x, u).value), 1e-9) << x;
  }
}

TEST(Routes, WideGroupsFarOutAgainstImhof) {
  // Large arguments on specs whose contour groups span a wide theta range.
  const auto s = normalize_spec({make_term(0.2, 1, 3.0), make_term(1.5, 1), make_term(9.0, 2, 1.0), make_term(14.0, 1)});
  const double sd = std::sqrt(s.variance());
  for (double k : {2.0, 6.0, 12.0}) {
    const double x = s.mean() + k * sd;
    const double ref = imhof_survivor(s, x, 1e-14);
    EXPECT_LT(rel(survivor(s, x).value, ref), 1e-6) << x;
  }
}

TEST(Routes, WideGroupsDeepTailSelfConsistent) {
  // Beyond the reach of the real-line oracle: theta0 and contour choice must not matter.
  const auto s = normalize_spec({make_term(0.2, 1, 3.0), make_term(1.5, 1), make_term(9.0, 2, 1.0), make_term(14.0, 1)});
  const double x = s.mean() + 30.0 * std::sqrt(s.variance());
  const auto base = survivor(s, x);
  EXPECT_NE(base.contour.find("box"), std::string::npos) << base.contour;
  EXPECT_GT(base.value, 0.0);
  EXPECT_LT(base.value, 1e-20);
  for (double th0 : {0.2 / x, 3.0 / x}) {
    EXPECT_LT(rel(survivor(s, x, th0).value, base.value), 1e-8) << th0;
  }
  EXPECT_LT(rel(survivor(s, x, {}, uncollapsed()).value, base.value), 1e-8);
}

TEST(Routes, RectangleAroundWideCut) {
  // Wide non-central cut far from the origin after scaling: enclosed by a rectangle.
  const auto s = normalize_spec({make_term(0.5, 1, 4.0), make_term(1.0, 1), make_term(20.0, 1, 2.0), make_term(30.0, 1)});
  for (double x : {5.0, 20.0, 60.0}) {
    const auto r = survivor(s, x);
    EXPECT_NE(r.contour.find("box"), std::string::npos) << r.contour;
    EXPECT_LT(rel(r.value, imhof_survivor(s, x, 1e-14)), 1e-6) << x;
  }
}

TEST(Survivor, DeepTailRelative) {
  // chi^2_2 survivor e^{-x/2} far below double cancellation of 1 - cdf.
  const auto s = normalize_spec({make_term(0.5, 2)});
  EXPECT_LT(rel(survivor(s, 200.0).value, std::exp(-100.0)), 1e-9);
  const auto t = normalize_spec({make_term(0.5, 1), make_term(1.0, 3, 1.0)});
  const double x = t.mean() + 40.0 * std::sqrt(t.variance());
  const double v = survivor(t, x).value;
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1e-6);
}

TEST(Cdf, DerivativeIsDensity) {
  const auto s = normalize_spec({make_term(0.8, 1), make_term(1.4, 3, 0.9), make_term(2.5, 2)});
  const double h = 1e-4;
  for (double x : {0.5, 2.0, 4.5}) {
    const double d = (cdf(s, x + h).value - cdf(s, x - h).value) / (2.0 * h);
    EXPECT_NEAR(d, pdf(s, x).value, 1e-7) << x;
  }
}

TEST(Cdf, Theta0Invariance) {
  const auto s = normalize_spec({make_term(0.8, 1), make_term(1.4, 3, 0.9), make_term(2.5, 2)});
  for (double x : {0.5, 2.0, 4.5}) {
    const double base = cdf(s, x).value;
    for (double th0 : {0.05, 0.4, 1.0, 3.0}) {
      EXPECT_NEAR(cdf(s, x, th0).value, base, 1e-10) << x << " " << th0;
    }
  }
}

TEST(Cdf, SurvivorComplement) {
  const auto s = normalize_spec({make_term(0.8, 1), make_term(2.5, 2, 1.5)});
  for (double x : {0.5, 2.0, 4.5}) {
    EXPECT_NEAR(cdf(s, x).value + survivor(s, x).value, 1.0, 1e-11);
  }
}

TEST(Cdf, Theta0Rejected) {
  const auto s = normalize_spec({make_term(1, 2)});
  EXPECT_THROW(cdf(s, 1.0, -1.0), Error);
  EXPECT_THROW(cdf(s, 1.0, 0.0), Error);
}

TEST(Lift, ChiSquareThree) {
  const auto s = normalize_spec({make_term(0.5, 1)});
  const auto lift = multiplicity_lift(s, 0, 1e-12);
  EXPECT_EQ(lift.lifted_spec().positive[0].n, 3);
  for (double x : {0.4, 2.5, 6.0}) {
    EXPECT_LT(rel(lift(x).value, gamma_pdf(0.5, 3, x)), 1e-8) << x;
  }
}

TEST(Lift, MatchesDirectEvaluation) {
  const auto s = normalize_spec({make_term(0.7, 1), make_term(1.3, 1), make_term(2.2, 1)});
  for (std::size_t j = 0; j < 3; ++j) {
    const auto lift = multiplicity_lift(s, j, 1e-12);
    EXPECT_TRUE(lift.analytic());
    for (double x : {0.6, 3.0}) {
      EXPECT_LT(rel(lift(x).value, pdf(lift.lifted_spec(), x).value), 1e-9) << j << " " << x;
    }
  }
}

TEST(Lift, FiniteDifferenceRoute) {
  // Non-analytic case: differentiate numerically and compare with the lifted spec.
  const auto s = normalize_spec({make_term(0.6, 1, 1.5), make_term(1.2, 1), make_term(2.0, 2, 0.8)});
  const auto lift = multiplicity_lift(s, 1, 1e-12);
  for (double x : {0.8, 2.5}) {
    EXPECT_LT(rel(lift(x).value, pdf(lift.lifted_spec(), x).value), 1e-6) << x;
  }
}

TEST(FbNorm, UniformSphere) {
  // theta = 0 is not allowed; a common shift gives e^{-c} times the sphere area.
  Eigen::Vector3d theta(2.0, 2.0, 2.0);
  const double c = fb_norm_from_pdf(theta, Eigen::Vector3d::Zero(), Eigen::Vector3i::Ones());
  EXPECT_LT(rel(c, 4.0 * pi * std::exp(-2.0)), 1e-10);
}

TEST(FbNorm, AgainstSphereQuadrature) {
  const Eigen::Vector3d theta(1.0, 2.0, 3.0);
  const Eigen::Vector3d gamma(0.0, 1.0, 0.0);
  const double c = fb_norm_from_pdf(theta, gamma, Eigen::Vector3i::Ones());
  // exp(-sum theta x^2 + gamma . x) on the sphere in polar coordinates about x_2.
  double ref = 0.0;
  const int nu = 400, nv = 400;
  for (int i = 0; i < nu; ++i) {
    // Gauss-Legendre would be tidier; a midpoint rule in cos(polar) is spectrally accurate here
    // only in the azimuth, so use many nodes in both.
    const double w = -1.0 + (i + 0.5) * 2.0 / nu;
    const double r = std::sqrt(1.0 - w * w);
    for (int j = 0; j < nv; ++j) {
      const double phi = (j + 0.5) * 2.0 * pi / nv;
      const double x1 = r * std::cos(phi), x3 = r * std::sin(phi), x2 = w;
      ref += std::exp(-(theta[0] * x1 * x1 + theta[1] * x2 * x2 + theta[2] * x3 * x3) + gamma[1] * x2);
    }
  }
  ref *= (2.0 / nu) * (2.0 * pi / nv);
  EXPECT_LT(rel(c, ref), 1e-5);
}

TEST(Plan, Shapes) {
  const auto central = normalize_spec({make_term(1, 1), make_term(2, 1), make_term(3, 2)});
  const auto p = plan_contour(central);
  int segments = 0, residues = 0;
  for (const auto& piece : p.pieces) {
    segments += piece.kind == ContourPiece::Kind::RealSegment;
    residues += piece.kind == ContourPiece::Kind::Residue;
    EXPECT_FALSE(piece.describe().empty());
  }
  EXPECT_EQ(segments, 1);
  EXPECT_EQ(residues, 1);

  const auto even = normalize_spec({make_term(1, 2), make_term(2, 4)});
  EXPECT_TRUE(plan_contour(even).residues_only());

  const auto nc = normalize_spec({make_term(1, 1, 2.0), make_term(2, 1), make_term(4, 1)});
  bool has_unbounded = false;
  for (const auto& piece : plan_contour(nc).pieces) {
    has_unbounded |= piece.kind == ContourPiece::Kind::KeyholeRays ||
                     piece.kind == ContourPiece::Kind::SemiInfinite;
    if (piece.kind == ContourPiece::Kind::Circle) {
      EXPECT_GT(piece.radius, 0.0);
    }
  }
  EXPECT_TRUE(has_unbounded);
}

TEST(Plan, PiecesSumToDensity) {
  const auto s = normalize_spec({make_term(0.9, 1, 0.5), make_term(1.6, 2), make_term(2.9, 3)});
  const auto plan = plan_contour(s);
  const auto sum = sum_contour(plan, s, 1.0, 0.0, 1e-12);
  const double kappa = IntegrandContext(s.positive).kappa();
  EXPECT_LT(rel(kappa * sum.value, pdf(s, 1.0).value), 1e-10);
}

TEST(Errors, DifferenceRejectedByPositiveRoutes) {
  const auto d = normalize_spec({make_term(1, 2)}, {make_term(1, 2)});
  EXPECT_THROW(pdf(d, 1.0), Error);
}

TEST(Errors, NonPositiveArgument) {
  const auto s = normalize_spec({make_term(1, 3)});
  EXPECT_EQ(pdf(s, 0.0).value, 0.0);
  EXPECT_EQ(pdf(s, -1.0).value, 0.0);
  EXPECT_EQ(cdf(s, -1.0).value, 0.0);
}
