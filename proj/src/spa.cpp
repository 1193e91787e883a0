#include "gchisq/spa.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_kappa(const std::vector<ChiSquareTerm>& terms) {
  double lk = 0.0;
  for (const auto& t : terms) lk += 0.5 * t.n * std::log(t.theta) - t.gamma2 / (4.0 * t.theta);
  return lk;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

CgfContext::CgfContext(const QuadraticFormSpec& spec) : spec_(normalize_spec(spec)) {
  upper_ = spec_.positive.empty() ? kInf : spec_.positive.front().theta;
  lower_ = spec_.negative.empty() ? -kInf : -spec_.negative.front().theta;
}

double CgfContext::K(double t) const {
  double k = 0.0;
  for (const auto& x : spec_.positive) {
    k += -0.5 * x.n * std::log1p(-t / x.theta) + x.gamma2 * t / (4.0 * x.theta * (x.theta - t));
  }
  for (const auto& y : spec_.negative) {
    k += -0.5 * y.n * std::log1p(t / y.theta) - y.gamma2 * t / (4.0 * y.theta * (y.theta + t));
  }
  return k;
}

double CgfContext::K1(double t) const {
  double k = 0.0;
  for (const auto& x : spec_.positive) {
    const double d = x.theta - t;
    k += 0.5 * x.n / d + x.gamma2 / (4.0 * d * d);
  }
  for (const auto& y : spec_.negative) {
    const double d = y.theta + t;
    k -= 0.5 * y.n / d + y.gamma2 / (4.0 * d * d);
  }
  return k;
}

double CgfContext::K2(double t) const {
  double k = 0.0;
  for (const auto& x : spec_.positive) {
    const double d = x.theta - t;
    k += 0.5 * x.n / (d * d) + x.gamma2 / (2.0 * d * d * d);
  }
  for (const auto& y : spec_.negative) {
    const double d = y.theta + t;
    k += 0.5 * y.n / (d * d) + y.gamma2 / (2.0 * d * d * d);
  }
  return k;
}

double CgfContext::K3(double t) const {
  double k = 0.0;
  for (const auto& x : spec_.positive) {
    const double d = x.theta - t;
    k += x.n / (d * d * d) + 1.5 * x.gamma2 / (d * d * d * d);
  }
  for (const auto& y : spec_.negative) {
    const double d = y.theta + t;
    k -= y.n / (d * d * d) + 1.5 * y.gamma2 / (d * d * d * d);
  }
  return k;
}

double solve_saddle(const CgfContext& ctx, double s) {
  if (!std::isfinite(s)) throw Error(Errc::SaddleOutOfRange, "non-finite argument");
  double scale = 0.0;
  for (const auto& t : ctx.spec().positive) scale = std::max(scale, t.theta);
  for (const auto& t : ctx.spec().negative) scale = std::max(scale, t.theta);
  double lo;
  double hi;
  if (std::isfinite(ctx.lower())) {
    lo = ctx.lower() + 1e-9 * std::abs(ctx.lower());
  } else {
    // K' tends to 0 from above as t -> -inf for a positive combination.
    if (s <= 0.0) throw Error(Errc::SaddleOutOfRange, "s must be positive for a positive combination");
    lo = -scale;
    while (ctx.K1(lo) > s) {
      lo *= 2.0;
      if (lo < -1e300) throw Error(Errc::SaddleOutOfRange, "no saddle below");
    }
  }
  if (std::isfinite(ctx.upper())) {
    hi = ctx.upper() - 1e-9 * std::abs(ctx.upper());
  } else {
    if (s >= 0.0) throw Error(Errc::SaddleOutOfRange, "s must be negative when X is absent");
    hi = scale;
    while (ctx.K1(hi) < s) {
      hi *= 2.0;
      if (hi > 1e300) throw Error(Errc::SaddleOutOfRange, "no saddle above");
    }
  }
  if (ctx.K1(lo) > s || ctx.K1(hi) < s) throw Error(Errc::SaddleOutOfRange, "s outside the range of K'");

  const double tol = 1e-12 * (1.0 + std::abs(s));
  double t = 0.0;  // the mean
  if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double r = ctx.K1(t) - s;
    if (std::abs(r) < tol) return t;
    if (r > 0.0) hi = t; else lo = t;
    double next = t - r / ctx.K2(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) return t;
    t = next;
  }
  if (std::abs(ctx.K1(t) - s) < 1e3 * tol) return t;
  throw Error(Errc::NoConvergence, "saddlepoint iteration did not converge");
}

double spa_pdf(const CgfContext& ctx, double s) {
  const double t = solve_saddle(ctx, s);
  return std::exp(ctx.K(t) - t * s) / std::sqrt(2.0 * std::numbers::pi * ctx.K2(t));
}

double spa_cdf(const CgfContext& ctx, double s) {
  const double t = solve_saddle(ctx, s);
  const double k2 = ctx.K2(t);
  const double u = t * std::sqrt(k2);
  if (std::abs(u) < 1e-5) {
    return 0.5 + ctx.K3(0.0) / (6.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(ctx.K2(0.0), 1.5));
  }
  const double w2 = 2.0 * (t * s - ctx.K(t));
  const double w = std::copysign(std::sqrt(std::max(w2, 0.0)), t);
  const double phi = std::exp(-0.5 * w * w) / std::sqrt(2.0 * std::numbers::pi);
  return std_normal_cdf(w) + phi * (1.0 / w - 1.0 / u);
}

double spa_cdf_via_pdf(const CgfContext& ctx, double s, std::optional<double> theta0) {
  const auto& spec = ctx.spec();
  if (spec.positive.empty()) return 1.0 - spa_survivor_via_pdf(ctx, s, theta0);
  double th0;
  if (spec.negative.empty()) {
    if (s <= 0.0) return 0.0;
    th0 = theta0.value_or(1.0 / s);
  } else {
    th0 = theta0.value_or(0.5 * spec.negative.front().theta);
    if (!(th0 < spec.negative.front().theta)) {
      throw Error(Errc::Theta0OutOfRange, "theta0 must lie below min theta'");
    }
  }
  if (!(th0 > 0.0)) throw Error(Errc::Theta0OutOfRange, "theta0 must be positive");
  std::vector<ChiSquareTerm> pos{ChiSquareTerm{th0, 2, 0.0}};
  for (auto t : spec.positive) {
    t.theta += th0;
    pos.push_back(t);
  }
  std::vector<ChiSquareTerm> neg;
  for (auto t : spec.negative) {
    t.theta -= th0;
    neg.push_back(t);
  }
  const QuadraticFormSpec aug = normalize_spec(std::move(pos), std::move(neg));
  const double log_pref = log_kappa(spec.positive) + log_kappa(spec.negative) + s * th0 -
                          log_kappa(aug.positive) - log_kappa(aug.negative);
  return std::exp(log_pref) * spa_pdf(CgfContext(aug), s);
}

double spa_survivor_via_pdf(const CgfContext& ctx, double s, std::optional<double> theta0) {
  const auto& spec = ctx.spec();
  if (spec.positive.empty()) return 0.0;
  const double min_pos = spec.positive.front().theta;
  const double th0 = theta0.value_or(0.5 * min_pos);
  if (!(th0 > 0.0 && th0 < min_pos)) {
    throw Error(Errc::Theta0OutOfRange, "theta0 must lie in (0, min theta)");
  }
  std::vector<ChiSquareTerm> pos;
  for (auto t : spec.positive) {
    t.theta -= th0;
    pos.push_back(t);
  }
  std::vector<ChiSquareTerm> neg{ChiSquareTerm{th0, 2, 0.0}};
  for (auto t : spec.negative) {
    t.theta += th0;
    neg.push_back(t);
  }
  const QuadraticFormSpec aug = normalize_spec(std::move(pos), std::move(neg));
  const double log_pref = log_kappa(spec.positive) + log_kappa(spec.negative) - s * th0 -
                          log_kappa(aug.positive) - log_kappa(aug.negative);
  return std::exp(log_pref) * spa_pdf(CgfContext(aug), s);
}

}  // namespace gchisq
