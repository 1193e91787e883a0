#include "gchisq/integrand.hpp"

#include <cmath>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

constexpr double kMaxExponent = 700.0;

}  // namespace

IntegrandContext::IntegrandContext(std::vector<ChiSquareTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    log_kappa_ += 0.5 * t.n * std::log(t.theta) - t.gamma2 / (4.0 * t.theta);
  }
}

double IntegrandContext::kappa() const { return std::exp(log_kappa_); }

void accumulate_log_g(std::span<const ChiSquareTerm> terms, cplx t, double& log_mod, double& arg,
                      double anchor) {
  double essential = 0.0;
  for (const auto& term : terms) {
    // Componentwise so that the sign of a zero imaginary part survives.
    const double re = (term.theta - anchor) + t.real();
    const double im = t.imag();
    const double r2 = re * re + im * im;
    if (std::sqrt(r2) < 1e-300) {
      throw Error(Errc::PoleEvaluation, "evaluation at a pole of g");
    }
    log_mod -= 0.25 * term.n * std::log(r2);
    arg -= 0.5 * term.n * std::atan2(im, re);
    if (term.gamma2 != 0.0) {
      // gamma^2 / (4 (theta + t)) = gamma^2 (re - i im) / (4 r2)
      essential += term.gamma2 * re / (4.0 * r2);
      arg -= term.gamma2 * im / (4.0 * r2);
    }
  }
  if (essential > kMaxExponent) {
    throw Error(Errc::PoleEvaluation, "too close to a non-central pole");
  }
  log_mod += essential;
}

cplx g_eval(const IntegrandContext& ctx, cplx t) {
  double log_mod = 0.0;
  double arg = 0.0;
  accumulate_log_g(ctx.terms(), t, log_mod, arg);
  return std::polar(std::exp(log_mod), arg);
}

cplx g_diff_eval(const IntegrandContext& x, const IntegrandContext& y, cplx t) {
  double log_mod = 0.0;
  double arg = 0.0;
  accumulate_log_g(x.terms(), t, log_mod, arg);
  accumulate_log_g(y.terms(), cplx(-t.real(), -t.imag()), log_mod, arg);
  return std::polar(std::exp(log_mod), arg);
}

ContourIntegrand::ContourIntegrand(std::span<const ChiSquareTerm> positive,
                                   std::span<const ChiSquareTerm> negative, double s,
                                   double log_scale)
    : positive_(positive), negative_(negative), s_(s), log_scale_(log_scale) {}

cplx ContourIntegrand::operator()(cplx t) const { return at_offset(0.0, t); }

double ContourIntegrand::log_abs_at_offset(double anchor, cplx offset) const {
  double log_mod = log_scale_ + s_ * (offset.real() - anchor);
  double arg = 0.0;
  accumulate_log_g(positive_, offset, log_mod, arg, anchor);
  if (!negative_.empty()) {
    accumulate_log_g(negative_, cplx(-offset.real(), -offset.imag()), log_mod, arg, -anchor);
  }
  return log_mod;
}

cplx ContourIntegrand::at_offset(double anchor, cplx offset) const {
  double log_mod = log_scale_ + s_ * (offset.real() - anchor);
  double arg = s_ * offset.imag();
  accumulate_log_g(positive_, offset, log_mod, arg, anchor);
  if (!negative_.empty()) {
    accumulate_log_g(negative_, cplx(-offset.real(), -offset.imag()), log_mod, arg, -anchor);
  }
  if (log_mod < -745.0) return cplx(0.0, 0.0);
  return std::polar(std::exp(log_mod), arg);
}

}  // namespace gchisq
