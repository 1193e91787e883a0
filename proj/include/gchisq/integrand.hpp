#pragma once

#include <complex>
#include <span>
#include <vector>

#include "gchisq/qform.hpp"

namespace gchisq {

using cplx = std::complex<double>;

// Terms of one positive combination together with its normalizing factor
//   kappa = prod theta_i^{n_i/2} exp(-sum gamma_i^2 / (4 theta_i)).
class IntegrandContext {
 public:
  explicit IntegrandContext(std::vector<ChiSquareTerm> terms);

  std::span<const ChiSquareTerm> terms() const { return terms_; }
  double log_kappa() const { return log_kappa_; }
  double kappa() const;

 private:
  std::vector<ChiSquareTerm> terms_;
  double log_kappa_ = 0.0;
};

// log g(t) split into modulus and argument, with per-factor principal branches.
// Adds into (log_mod, arg). Signed zeros in Im(t) select the side of a cut.
// With an anchor a, the factors use (theta_i - a) + t, so t is an offset from -a and a
// factor vanishing at the anchor is formed exactly.
void accumulate_log_g(std::span<const ChiSquareTerm> terms, cplx t, double& log_mod, double& arg,
                      double anchor = 0.0);

// g(t) = exp(sum gamma_i^2 / (4 (theta_i + t))) / prod (theta_i + t)^{n_i/2}.
cplx g_eval(const IntegrandContext& ctx, cplx t);

// g(t) * g'(-t), the product appearing in the pdf of X - Y.
cplx g_diff_eval(const IntegrandContext& x, const IntegrandContext& y, cplx t);

// G(t) = g(t) g'(-t) e^{s t}, evaluated in log space so that large e^{st} and small g
// do not overflow separately. `negative` may be empty.
class ContourIntegrand {
 public:
  ContourIntegrand(std::span<const ChiSquareTerm> positive, std::span<const ChiSquareTerm> negative,
                   double s, double log_scale = 0.0);

  cplx operator()(cplx t) const;
  // G(-anchor + offset), with the factor of a term at theta == anchor formed exactly.
  cplx at_offset(double anchor, cplx offset) const;
  // log |G(-anchor + offset)|.
  double log_abs_at_offset(double anchor, cplx offset) const;

  std::span<const ChiSquareTerm> positive() const { return positive_; }
  std::span<const ChiSquareTerm> negative() const { return negative_; }
  double s() const { return s_; }
  double log_scale() const { return log_scale_; }

 private:
  std::span<const ChiSquareTerm> positive_;
  std::span<const ChiSquareTerm> negative_;
  double s_;
  double log_scale_;
};

}  // namespace gchisq
