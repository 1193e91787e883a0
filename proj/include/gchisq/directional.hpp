#pragma once

#include <Eigen/Dense>

#include "gchisq/inversion.hpp"

namespace gchisq {

// Bingham parameters: density proportional to exp(-sum theta_i |x_i|^2) on the unit sphere,
// where coordinate block i has n_i components. Thetas may have any sign.
struct BinghamParams {
  Eigen::VectorXd theta;
  Eigen::VectorXi n;

  static BinghamParams unit(const Eigen::VectorXd& theta);
};

// Integral of exp(-sum theta_i |x_i|^2) over the sphere (surface measure).
double bingham_const(const BinghamParams& params, const ContourOptions& opts = {});
// Same constant, always through fb_norm_from_pdf (no explicit p = 3, 4 forms).
double bingham_const_generic(const BinghamParams& params, const ContourOptions& opts = {});
// dC / d theta_i for each entry of params.theta.
Eigen::VectorXd bingham_const_gradient(const BinghamParams& params,
                                       double rel_tol = kDefaultRelTol);

// Integral of exp(tr(diag(phi) R)) over SO(3), with the measure induced from the unit
// quaternion sphere (total mass pi^2).
double fisher_so3_const(const Eigen::Vector3d& phi);
// The same divided by its value at phi = 0 (a probability measure).
double fisher_so3_const_normalized(const Eigen::Vector3d& phi);
// Gradient of log fisher_so3_const, i.e. E[R_ii].
Eigen::Vector3d fisher_so3_grad(const Eigen::Vector3d& phi);

// Normalizing constant of the complex Bingham distribution with distinct thetas:
//   2 pi^k sum_r e^{-theta_r} / prod_{i != r} (theta_i - theta_r).
double complex_bingham_const(const Eigen::VectorXd& theta);

struct KentParams {
  double beta = 0.0;
  double kappa = 0.0;
};

// Integral of exp(kappa x_1 + beta (x_2^2 - x_3^2)) over S^2; radius as in kent_contour_const,
// given as a fraction of beta.
double kent_const(const KentParams& params, double radius_fraction = 0.75);

// C(theta, gamma) for theta = (0, alpha, 2 alpha) with linear coefficient gamma on the middle
// coordinate: a circle of radius r around the finite cut plus the collapsed unbounded cut.
// Requires alpha / 2 < r < alpha.
double kent_contour_const(double alpha, double gamma, double r, double rel_tol = 1e-12);

}  // namespace gchisq
