#include "gchisq/difference.hpp"

#include <algorithm>
#include <cmath>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

double log_kappa(std::span<const ChiSquareTerm> terms) {
  double lk = 0.0;
  for (const auto& t : terms) lk += 0.5 * t.n * std::log(t.theta) - t.gamma2 / (4.0 * t.theta);
  return lk;
}

int dof(std::span<const ChiSquareTerm> terms) {
  int n = 0;
  for (const auto& t : terms) n += t.n;
  return n;
}

double min_theta_all(const QuadraticFormSpec& spec) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : spec.positive) m = std::min(m, t.theta);
  for (const auto& t : spec.negative) m = std::min(m, t.theta);
  return m;
}

QuadraticFormSpec scaled_by(QuadraticFormSpec spec, double c) {
  for (auto& t : spec.positive) {
    t.theta *= c;
    t.gamma2 *= c;
  }
  for (auto& t : spec.negative) {
    t.theta *= c;
    t.gamma2 *= c;
  }
  return spec;
}

Route route_of(const ContourPlan& plan) {
  return plan.residues_only() ? Route::ClosedForm : Route::GeneralContour;
}

void require_terms(const QuadraticFormSpec& spec) {
  if (spec.positive.empty() && spec.negative.empty()) {
    throw Error(Errc::EmptyPositiveList, "no terms");
  }
}

// Density for z >= 0 with a non-empty positive list.
EvalResult pdf_diff_nonneg(const QuadraticFormSpec& spec, double z, const ContourOptions& opts) {
  const double c = z > 0.0 ? z : 1.0 / min_theta_all(spec);
  const auto sc = scaled_by(spec, c);
  const auto plan = plan_contour(sc, opts);
  const double log_scale = log_kappa(sc.positive) + log_kappa(sc.negative);
  const auto sum = sum_contour(plan, sc, z / c, log_scale, opts.rel_tol);
  return EvalResult{sum.value / c, sum.abs_err / c, route_of(plan), sum.n_evals, plan.describe()};
}

struct DiffCdfParts {
  double cdf;
  double survivor;
  double abs_err;
  long n_evals;
  Route route;
  std::string contour;
};

DiffCdfParts cdf_diff_nonneg(const QuadraticFormSpec& spec, double z, std::optional<double> theta0,
                             const ContourOptions& opts) {
  if (spec.positive.empty()) return DiffCdfParts{1.0, 0.0, 0.0, 0, Route::ClosedForm, ""};
  if (spec.negative.empty()) {
    const auto c = cdf(spec, z, {}, opts);
    const auto s = survivor(spec, z, {}, opts);
    return DiffCdfParts{c.value, s.value, c.abs_err, c.n_evals + s.n_evals, c.route, c.contour};
  }
  const double min_neg = spec.negative.front().theta;
  const double th0 = theta0.value_or(0.5 * min_neg);
  if (!(th0 > 0.0 && th0 < min_neg)) {
    throw Error(Errc::Theta0OutOfRange, "theta0 must lie in (0, min theta')");
  }
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
  const auto aug = normalize_spec(std::move(pos), std::move(neg));
  const double c = z > 0.0 ? z : 1.0 / min_theta_all(aug);
  const auto sc = scaled_by(aug, c);
  const double log_scale = log_kappa(spec.positive) + log_kappa(spec.negative) + z * th0 +
                           0.5 * (dof(spec.positive) + dof(spec.negative)) * std::log(c);
  // theta0 is the smallest positive theta of the augmented spec.
  const auto plan = plan_contour(sc, opts, std::size_t{0});
  const auto sum = sum_contour(plan, sc, z / c, log_scale, opts.rel_tol, std::size_t{0});
  return DiffCdfParts{sum.excluded + sum.value, -sum.value, sum.abs_err, sum.n_evals,
                      route_of(plan), plan.describe()};
}

DiffCdfParts cdf_diff_parts(const QuadraticFormSpec& input, double z,
                            std::optional<double> theta0, const ContourOptions& opts) {
  const auto spec = normalize_spec(input);
  require_terms(spec);
  if (z >= 0.0) return cdf_diff_nonneg(spec, z, theta0, opts);
  // P(Z <= z) = P(-Z >= -z); theta0 refers to the exchanged spec.
  auto p = cdf_diff_nonneg(swapped(spec), -z, theta0, opts);
  std::swap(p.cdf, p.survivor);
  return p;
}

}  // namespace

EvalResult pdf_diff(const QuadraticFormSpec& input, double z, const ContourOptions& opts) {
  const auto spec = normalize_spec(input);
  require_terms(spec);
  if (!spec.is_difference()) return pdf(spec, z, opts);
  const auto& use = z >= 0.0 ? spec : swapped(spec);
  const double az = std::abs(z);
  if (use.positive.empty()) {
    // Z is almost surely on the other side of zero.
    return EvalResult{0.0, 0.0, Route::ClosedForm, 0, ""};
  }
  return pdf_diff_nonneg(use, az, opts);
}

EvalResult cdf_diff(const QuadraticFormSpec& spec, double z, std::optional<double> theta0,
                    const ContourOptions& opts) {
  const auto p = cdf_diff_parts(spec, z, theta0, opts);
  return EvalResult{p.cdf, p.abs_err, p.route, p.n_evals, p.contour};
}

EvalResult survivor_diff(const QuadraticFormSpec& spec, double z, std::optional<double> theta0,
                         const ContourOptions& opts) {
  const auto p = cdf_diff_parts(spec, z, theta0, opts);
  return EvalResult{p.survivor, p.abs_err, p.route, p.n_evals, p.contour};
}

namespace {

void check_rates(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg) {
  if (pos.size() == 0) throw Error(Errc::EmptyPositiveList, "no positive rates");
  for (Eigen::Index i = 0; i < pos.size(); ++i) {
    if (!(pos[i] > 0.0)) throw Error(Errc::NonPositiveTheta, "rates must be positive");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (pos[i] == pos[j]) throw Error(Errc::DuplicateRates, "rates must be distinct");
    }
  }
  for (Eigen::Index k = 0; k < neg.size(); ++k) {
    if (!(neg[k] > 0.0)) throw Error(Errc::NonPositiveTheta, "rates must be positive");
    for (Eigen::Index j = 0; j < k; ++j) {
      if (neg[k] == neg[j]) throw Error(Errc::DuplicateRates, "rates must be distinct");
    }
  }
}

// sum_i w_i e^{-a_i z} / (prod_{j != i}(a_j - a_i) prod_k (b_k + a_i)), times prod a prod b,
// with w_i = 1 for the density and 1/a_i for the upper tail.
double hypoexp_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double z, bool tail) {
  const double scale = a.prod() * (b.size() ? b.prod() : 1.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double den = tail ? a[i] : 1.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (j != i) den *= a[j] - a[i];
    }
    for (Eigen::Index k = 0; k < b.size(); ++k) den *= b[k] + a[i];
    acc += std::exp(-a[i] * z) / den;
  }
  return scale * acc;
}

}  // namespace

double hypoexp_diff_pdf(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg, double z) {
  check_rates(pos, neg);
  if (z >= 0.0) return hypoexp_sum(pos, neg, z, false);
  if (neg.size() == 0) return 0.0;
  return hypoexp_sum(neg, pos, -z, false);
}

double hypoexp_diff_survivor(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg, double z) {
  check_rates(pos, neg);
  if (z >= 0.0) return hypoexp_sum(pos, neg, z, true);
  if (neg.size() == 0) return 1.0;
  return 1.0 - hypoexp_sum(neg, pos, -z, true);
}

}  // namespace gchisq
