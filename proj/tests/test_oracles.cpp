#include <cmath>

#include <gtest/gtest.h>

#include "gchisq/difference.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/oracles.hpp"
#include "gchisq/qform.hpp"

using namespace gchisq;

TEST(Imhof, ChiSquareThree) {
  const auto s = normalize_spec({make_term(0.5, 3)});
  // P(chi^2_3 <= 3).
  EXPECT_NEAR(imhof_cdf(s, 3.0), 0.60837482372891, 1e-9);
}

TEST(Imhof, Exponential) {
  const auto s = normalize_spec({make_term(1.0, 2)});
  EXPECT_NEAR(imhof_cdf(s, 1.0), 1.0 - std::exp(-1.0), 1e-9);
  EXPECT_NEAR(imhof_survivor(s, 0.0), 1.0, 1e-9);
}

TEST(Imhof, DifferenceTableValue) {
  const auto d = normalize_spec(
      {term_from_coefficient(0.2, 6), term_from_coefficient(0.1, 4), term_from_coefficient(0.1 / 3.0, 2)},
      {term_from_coefficient(0.4, 2), term_from_coefficient(0.2, 4), term_from_coefficient(0.2 / 3.0, 6)});
  EXPECT_NEAR(imhof_survivor(d, 0.0), 0.4061061, 5e-8);
}

TEST(Imhof, Noncentral) {
  const auto s = normalize_spec({term_from_coefficient(1.0, 3, 2.0)});
  EXPECT_NEAR(imhof_cdf(s, 3.0, 1e-12), 0.35766818135999545, 1e-10);
}

TEST(MonteCarlo, ExponentialWithinStandardErrors) {
  const auto s = normalize_spec({make_term(1.0, 2)});
  const std::vector<double> grid{0.2, 1.0, 2.5};
  const auto est = mc_estimate(s, grid, 400000, 11);
  ASSERT_EQ(est.cdf.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT(std::abs(est.cdf[i] - (1.0 - std::exp(-grid[i]))), 4.0 * est.cdf_se[i]) << grid[i];
    EXPECT_GT(est.cdf_se[i], 0.0);
  }
  EXPECT_GT(est.bandwidth, 0.0);
}

TEST(MonteCarlo, Deterministic) {
  const auto s = normalize_spec({make_term(0.7, 1, 1.0), make_term(2.0, 3)}, {make_term(1.5, 2)});
  const std::vector<double> grid{-1.0, 0.0, 1.0};
  const auto a = mc_estimate(s, grid, 50000, 42);
  const auto b = mc_estimate(s, grid, 50000, 42);
  EXPECT_EQ(a.cdf, b.cdf);
  EXPECT_EQ(a.pdf, b.pdf);
  const auto c = mc_estimate(s, grid, 50000, 43);
  EXPECT_NE(a.cdf, c.cdf);
}

TEST(MonteCarlo, DifferenceSurvivor) {
  const auto d = normalize_spec({term_from_coefficient(0.7, 6, 6.0), term_from_coefficient(0.3, 2, 2.0)},
                                {term_from_coefficient(0.35, 1)});
  const auto est = mc_estimate(d, {2.0}, 400000, 5);
  EXPECT_LT(std::abs((1.0 - est.cdf[0]) - survivor_diff(d, 2.0).value), 4.0 * est.cdf_se[0]);
}

TEST(Convolution, ExponentialDifference) {
  const auto x = normalize_spec({make_term(1.0, 2)});
  const auto y = normalize_spec({make_term(2.0, 2)});
  EXPECT_NEAR(convolve_pdf_diff(x, y, 0.0), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(convolve_pdf_diff(x, x, 0.0), 0.5, 1e-10);
  EXPECT_NEAR(convolve_pdf_diff(x, y, -0.5), 2.0 / 3.0 * std::exp(-1.0), 1e-10);
}

TEST(Convolution, AgreesWithContour) {
  const auto x = normalize_spec({make_term(0.8, 1), make_term(1.9, 2, 0.7)});
  const auto y = normalize_spec({make_term(1.2, 3)});
  const auto d = normalize_spec(x.positive, y.positive);
  for (double z : {-1.0, 0.2, 1.5}) {
    EXPECT_NEAR(convolve_pdf_diff(x, y, z) / pdf_diff(d, z).value, 1.0, 1e-8) << z;
  }
}
