#pragma once

#include <complex>
#include <functional>

namespace gchisq {

template <typename T>
struct QuadratureResult {
  T value{};
  double abs_err = 0.0;
  long n_evals = 0;
};

using RealResult = QuadratureResult<double>;
using ComplexResult = QuadratureResult<std::complex<double>>;

inline constexpr double kDefaultRelTol = 1e-10;

struct AdaptiveLimits {
  long max_evals = 1000000;
  int max_depth = 60;
};

// Globally adaptive 10/21-point Gauss-Kronrod on [a, b]. Stops when the summed error
// estimate drops below max(abs_tol, rel_tol * |value|) or when every remaining
// interval is limited by round-off.
RealResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = kDefaultRelTol, double abs_tol = 0.0,
                            AdaptiveLimits limits = {});
ComplexResult integrate_finite_complex(const std::function<std::complex<double>(double)>& f,
                                     double a, double b, double rel_tol = kDefaultRelTol,
                                     double abs_tol = 0.0, AdaptiveLimits limits = {});

// Integral over [a, inf) through x = a + scale * w / (1 - w), w in [0, 1).
RealResult integrate_semi_infinite(const std::function<double(double)>& f, double a,
                                   double rel_tol = kDefaultRelTol, double abs_tol = 0.0,
                                   double scale = 1.0);

enum class CircleNormalization { Residue, Raw };

// Periodic trapezoidal rule on t = center + radius e^{iu}; the number of nodes doubles
// from 64. Residue normalization returns (1/(2 pi i)) of the closed contour integral.
ComplexResult integrate_circle(const std::function<std::complex<double>(std::complex<double>)>& f,
                               std::complex<double> center, double radius,
                               double rel_tol = kDefaultRelTol,
                               CircleNormalization norm = CircleNormalization::Residue);

// Double-exponential (tanh-sinh) rule for integrable endpoint singularities.
// f receives x together with the exact distances x - a and b - x.
RealResult integrate_tanh_sinh(const std::function<double(double, double, double)>& f, double a,
                               double b, double rel_tol = kDefaultRelTol);

}  // namespace gchisq
