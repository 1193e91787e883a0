#pragma once

#include <cstdint>
#include <vector>

#include "gchisq/qform.hpp"

namespace gchisq {

// Real-integral inversion along the vertical line:
//   P(Q > x) = 1/2 + (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du.
double imhof_survivor(const QuadraticFormSpec& spec, double x, double abs_tol = 1e-10);
double imhof_cdf(const QuadraticFormSpec& spec, double x, double abs_tol = 1e-10);

struct McEstimate {
  std::vector<double> x;
  std::vector<double> cdf;
  std::vector<double> cdf_se;
  std::vector<double> pdf;
  std::vector<double> pdf_se;
  double bandwidth = 0.0;
};

// Empirical cdf and density (window of half-width `bandwidth`, default 0.02 sd) from
// sums of squared normals.
McEstimate mc_estimate(const QuadraticFormSpec& spec, const std::vector<double>& x_grid,
                       std::int64_t n_samples, std::uint64_t seed, double bandwidth = 0.0);

// Density of X - Y at z by adaptive quadrature of int_0^inf f_X(y + z) f_Y(y) dy.
double convolve_pdf_diff(const QuadraticFormSpec& x, const QuadraticFormSpec& y, double z);

}  // namespace gchisq
