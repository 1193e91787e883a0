#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gchisq/error.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/qform.hpp"
#include "gchisq/spa.hpp"

using namespace gchisq;
using std::numbers::pi;

namespace {

const QuadraticFormSpec kExp1 = normalize_spec({make_term(1.0, 2)});

QuadraticFormSpec theta1() {
  return normalize_spec({make_term(5.0 / 6.0, 1), make_term(5.0 / 3.0, 1), make_term(5.0, 1)});
}

double quantile(const QuadraticFormSpec& s, double p) {
  double lo = 0.0, hi = s.mean() + 50.0 * std::sqrt(s.variance());
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(s, mid).value < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Saddle, Exponential) {
  const CgfContext ctx(kExp1);
  EXPECT_NEAR(solve_saddle(ctx, 2.0), 0.5, 1e-14);
  EXPECT_NEAR(solve_saddle(ctx, 1.0), 0.0, 1e-14);
  EXPECT_NEAR(solve_saddle(ctx, 0.25), -3.0, 1e-12);
}

TEST(Saddle, OutOfRange) {
  const CgfContext ctx(kExp1);
  for (double s : {0.0, -1.0, std::nan("")}) {
    try {
      solve_saddle(ctx, s);
      FAIL() << s;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::SaddleOutOfRange);
    }
  }
}

TEST(Cgf, Derivatives) {
  const auto s = normalize_spec({make_term(0.8, 1, 0.5), make_term(2.0, 3)}, {make_term(1.2, 2, 1.0)});
  const CgfContext ctx(s);
  EXPECT_DOUBLE_EQ(ctx.upper(), 0.8);
  EXPECT_DOUBLE_EQ(ctx.lower(), -1.2);
  EXPECT_NEAR(ctx.K(0.0), 0.0, 1e-15);
  EXPECT_NEAR(ctx.K1(0.0), s.mean(), 1e-13);
  EXPECT_NEAR(ctx.K2(0.0), s.variance(), 1e-13);
  const double h = 1e-5;
  for (double t : {-0.9, -0.2, 0.3, 0.7}) {
    EXPECT_NEAR(ctx.K1(t), (ctx.K(t + h) - ctx.K(t - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(ctx.K1(t))));
    EXPECT_NEAR(ctx.K2(t), (ctx.K1(t + h) - ctx.K1(t - h)) / (2 * h), 1e-6 * std::max(1.0, ctx.K2(t)));
    EXPECT_NEAR(ctx.K3(t), (ctx.K2(t + h) - ctx.K2(t - h)) / (2 * h), 1e-5 * std::max(1.0, std::abs(ctx.K3(t))));
    EXPECT_GT(ctx.K2(t), 0.0);
  }
}

TEST(SpaPdf, ExponentialConstantRatio) {
  // The density SPA of Exp(1) is e^{-s} times e / sqrt(2 pi) exactly.
  const CgfContext ctx(kExp1);
  const double ratio = std::exp(1.0) / std::sqrt(2.0 * pi);
  for (double s : {0.05, 0.5, 1.0, 3.0, 20.0}) {
    EXPECT_NEAR(spa_pdf(ctx, s) / std::exp(-s) / ratio, 1.0, 1e-10) << s;
  }
}

TEST(SpaCdf, ExponentialLugannaniRice) {
  const CgfContext ctx(kExp1);
  for (double s : {0.1, 0.5, 0.99, 1.01, 2.0, 5.0}) {
    EXPECT_NEAR(spa_cdf(ctx, s), 1.0 - std::exp(-s), 0.02) << s;
  }
}

TEST(SpaCdf, ContinuousAtTheMean) {
  const auto s = theta1();
  const CgfContext ctx(s);
  const double m = s.mean();
  const double at = spa_cdf(ctx, m);
  EXPECT_NEAR(spa_cdf(ctx, m - 1e-7), at, 1e-6);
  EXPECT_NEAR(spa_cdf(ctx, m + 1e-7), at, 1e-6);
  EXPECT_NEAR(spa_cdf(ctx, m - 1e-3), at, 1e-3);
}

TEST(SpaCdf, Monotone) {
  const CgfContext ctx(theta1());
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double v = spa_cdf(ctx, 0.02 * i);
    EXPECT_GE(v, prev) << i;
    prev = v;
  }
}

TEST(SpaViaPdf, Theta0Invariance) {
  const CgfContext ctx(theta1());
  for (double s : {0.3, 1.2, 4.0}) {
    const double base = spa_cdf_via_pdf(ctx, s);
    for (double th0 : {0.1, 1.0, 5.0}) {
      EXPECT_NEAR(spa_cdf_via_pdf(ctx, s, th0), base, 1e-12 * std::max(1.0, base));
    }
    const double sb = spa_survivor_via_pdf(ctx, s);
    for (double th0 : {0.1, 0.4, 0.8}) {
      EXPECT_NEAR(spa_survivor_via_pdf(ctx, s, th0) / sb, 1.0, 1e-10);
    }
  }
}

TEST(SpaViaPdf, Theta0Range) {
  const CgfContext ctx(theta1());
  EXPECT_THROW(spa_survivor_via_pdf(ctx, 1.0, 0.9), Error);
  EXPECT_THROW(spa_cdf_via_pdf(ctx, 1.0, -0.5), Error);
}

TEST(SpaAccuracy, CentralRangeLugannaniRice) {
  const auto s = theta1();
  const CgfContext ctx(s);
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const double x = quantile(s, p);
    EXPECT_NEAR(spa_cdf(ctx, x) / p, 1.0, 0.05) << p;
  }
}

TEST(SpaAccuracy, DeepTailLugannaniRice) {
  const auto s = theta1();
  const CgfContext ctx(s);
  const double x = quantile(s, 0.999);
  const double exact = survivor(s, x).value;
  EXPECT_NEAR((1.0 - spa_cdf(ctx, x)) / exact, 1.0, 0.05);
}

// The density-based survivor in the far upper tail misses 5% relative accuracy by
// construction (first-order density error carried into the tail); kept as a reported failure.
TEST(SpaAccuracy, DeepTailViaDensity) {
  const auto s = theta1();
  const CgfContext ctx(s);
  const double x = quantile(s, 0.999);
  const double exact = survivor(s, x).value;
  EXPECT_NEAR(spa_survivor_via_pdf(ctx, x) / exact, 1.0, 0.05);
}

TEST(SpaDifference, SignsAndRange) {
  const auto d = normalize_spec({make_term(1.0, 2)}, {make_term(2.0, 2)});
  const CgfContext ctx(d);
  // Exp(1) - Exp(2): P(Z <= 0) = 1/3.
  EXPECT_NEAR(spa_cdf(ctx, 0.0), 1.0 / 3.0, 0.02);
  EXPECT_GT(spa_pdf(ctx, -1.0), 0.0);
  EXPECT_GT(spa_pdf(ctx, 1.0), 0.0);
}
