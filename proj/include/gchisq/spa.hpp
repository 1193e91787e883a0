#pragma once

#include <optional>

#include "gchisq/qform.hpp"

namespace gchisq {

// Cumulant generating function of X - Y,
//   K(t) = sum [-(n/2) ln(1 - t/theta) + gamma2 t / (4 theta (theta - t))] + (same for Y at -t),
// on the open interval (-min theta', min theta).
class CgfContext {
 public:
  explicit CgfContext(const QuadraticFormSpec& spec);

  const QuadraticFormSpec& spec() const { return spec_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double K(double t) const;
  double K1(double t) const;
  double K2(double t) const;
  double K3(double t) const;

 private:
  QuadraticFormSpec spec_;
  double lower_;
  double upper_;
};

// Root of K'(t) = s; throws SaddleOutOfRange when s is outside the range of K'.
double solve_saddle(const CgfContext& ctx, double s);

// exp(K(t) - t s) / sqrt(2 pi K''(t)) at the saddle.
double spa_pdf(const CgfContext& ctx, double s);

// Lugannani-Rice approximation of P(X - Y <= s).
double spa_cdf(const CgfContext& ctx, double s);

// P(X - Y <= s) as the exact prefactor times the density SPA of the augmented
// combination with an extra (1/(2 theta0)) chi^2_2 term (default theta0 = 1/s for X alone,
// half the smallest theta' otherwise).
double spa_cdf_via_pdf(const CgfContext& ctx, double s, std::optional<double> theta0 = {});

// P(X - Y > s) by the same device, with the extra exponential on the negative side and
// theta0 in (0, min theta) (default half the smallest theta).
double spa_survivor_via_pdf(const CgfContext& ctx, double s, std::optional<double> theta0 = {});

}  // namespace gchisq
