#include "gchisq/directional.hpp"

#include <cmath>
#include <numbers>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

constexpr double kPi = std::numbers::pi;

struct Working {
  double shift;               // c with C(theta) = e^{-c} C(theta - c)
  QuadraticFormSpec spec;     // merged working thetas, all >= 1
  int dof;
  bool distinct_unit;         // every entry kept its own theta and has n = 1
};

Working prepare(const BinghamParams& p) {
  if (p.theta.size() == 0 || p.theta.size() != p.n.size()) {
    throw Error(Errc::InvalidArgument, "theta and n must have the same nonzero size");
  }
  int dof = 0;
  for (Eigen::Index i = 0; i < p.n.size(); ++i) {
    if (p.n[i] < 1) throw Error(Errc::NonIntegerDof, "multiplicities must be positive");
    if (!std::isfinite(p.theta[i])) throw Error(Errc::InvalidArgument, "theta must be finite");
    dof += p.n[i];
  }
  if (dof < 2) throw Error(Errc::InvalidArgument, "the sphere needs at least two coordinates");
  const double c = p.theta.minCoeff() - 1.0;
  std::vector<ChiSquareTerm> terms;
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) {
    terms.push_back(ChiSquareTerm{p.theta[i] - c, p.n[i], 0.0});
  }
  auto spec = normalize_spec(std::move(terms));
  bool unit = spec.positive.size() == static_cast<std::size_t>(p.theta.size());
  for (const auto& t : spec.positive) unit = unit && t.n == 1;
  return Working{c, std::move(spec), dof, unit};
}

std::vector<double> thetas_of(const QuadraticFormSpec& spec) {
  std::vector<double> th;
  for (const auto& t : spec.positive) th.push_back(t.theta);
  return th;
}

double log_sphere_factor(int dof) { return std::log(2.0) + 0.5 * dof * std::log(kPi); }

}  // namespace

BinghamParams BinghamParams::unit(const Eigen::VectorXd& theta) {
  return BinghamParams{theta, Eigen::VectorXi::Ones(theta.size())};
}

double bingham_const(const BinghamParams& params, const ContourOptions& opts) {
  const auto w = prepare(params);
  const auto p = w.spec.positive.size();
  if (w.distinct_unit && (p == 3 || p == 4)) {
    const auto th = thetas_of(w.spec);
    const auto sg = elementary::unit_dof_sum_with_gradient(th, 1.0, opts.rel_tol);
    return std::exp(log_sphere_factor(w.dof) - w.shift) * sg.value;
  }
  return bingham_const_generic(params, opts);
}

double bingham_const_generic(const BinghamParams& params, const ContourOptions& opts) {
  const auto w = prepare(params);
  const auto n = w.spec.positive.size();
  Eigen::VectorXd th(n);
  Eigen::VectorXi dof(n);
  for (std::size_t i = 0; i < n; ++i) {
    th[static_cast<Eigen::Index>(i)] = w.spec.positive[i].theta;
    dof[static_cast<Eigen::Index>(i)] = w.spec.positive[i].n;
  }
  return std::exp(-w.shift) * fb_norm_from_pdf(th, Eigen::VectorXd::Zero(n), dof, opts);
}

Eigen::VectorXd bingham_const_gradient(const BinghamParams& params, double rel_tol) {
  const auto w = prepare(params);
  const double lf = log_sphere_factor(w.dof) - w.shift;
  Eigen::VectorXd grad(params.theta.size());
  if (w.distinct_unit) {
    const auto th = thetas_of(w.spec);
    const auto sg = elementary::unit_dof_sum_with_gradient(th, 1.0, rel_tol);
    for (Eigen::Index i = 0; i < params.theta.size(); ++i) {
      const double ti = params.theta[i] - w.shift;
      for (std::size_t g = 0; g < th.size(); ++g) {
        if (th[g] == ti) grad[i] = std::exp(lf) * sg.gradient[static_cast<Eigen::Index>(g)];
      }
    }
    return grad;
  }
  // d(f/kappa)/d theta_i = -(n_i/2) f_lift/kappa_lift, with the lift on the merged group.
  double log_kappa = 0.0;
  for (const auto& t : w.spec.positive) log_kappa += 0.5 * t.n * std::log(t.theta);
  for (Eigen::Index i = 0; i < params.theta.size(); ++i) {
    const double ti = params.theta[i] - w.shift;
    std::size_t g = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < w.spec.positive.size(); ++k) {
      const double d = std::abs(w.spec.positive[k].theta - ti);
      if (d < best) {
        best = d;
        g = k;
      }
    }
    const auto lift = multiplicity_lift(w.spec, g, rel_tol);
    const double f_lift = lift(1.0).value;
    const double log_kappa_lift = log_kappa + std::log(w.spec.positive[g].theta);
    grad[i] = -0.5 * params.n[i] * std::exp(lf - log_kappa_lift) * f_lift;
  }
  return grad;
}

namespace {

Eigen::VectorXd so3_theta(const Eigen::Vector3d& phi) {
  Eigen::VectorXd th(4);
  th << -2.0 * phi[0], -2.0 * phi[1], -2.0 * phi[2], -2.0 * phi.sum();
  return th;
}

}  // namespace

double fisher_so3_const(const Eigen::Vector3d& phi) {
  return 0.5 * std::exp(-phi.sum()) * bingham_const(BinghamParams::unit(so3_theta(phi)));
}

double fisher_so3_const_normalized(const Eigen::Vector3d& phi) {
  return fisher_so3_const(phi) / (kPi * kPi);
}

Eigen::Vector3d fisher_so3_grad(const Eigen::Vector3d& phi) {
  const auto params = BinghamParams::unit(so3_theta(phi));
  const double C = bingham_const(params, ContourOptions{1e-12, true});
  const auto dC = bingham_const_gradient(params, 1e-12);
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) g[i] = -1.0 - (2.0 / C) * (dC[i] + dC[3]);
  return g;
}

double complex_bingham_const(const Eigen::VectorXd& theta) {
  const auto k = theta.size();
  if (k == 0) throw Error(Errc::InvalidArgument, "no thetas");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!std::isfinite(theta[i])) throw Error(Errc::InvalidArgument, "theta must be finite");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (theta[i] == theta[j]) throw Error(Errc::DuplicateRates, "thetas must be distinct");
    }
  }
  // Shift so that the largest exponential is 1.
  const double c = theta.minCoeff();
  double acc = 0.0;
  for (Eigen::Index r = 0; r < k; ++r) {
    double den = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (i != r) den *= theta[i] - theta[r];
    }
    acc += std::exp(-(theta[r] - c)) / den;
  }
  return 2.0 * std::pow(kPi, static_cast<double>(k)) * std::exp(-c) * acc;
}

double kent_contour_const(double alpha, double gamma, double r, double rel_tol) {
  if (!(alpha > 0.0) || !std::isfinite(gamma)) {
    throw Error(Errc::InvalidArgument, "alpha must be positive");
  }
  if (!(r > 0.5 * alpha && r < alpha)) {
    throw Error(Errc::InvalidArgument, "radius must lie in (alpha/2, alpha)");
  }
  const double g2 = gamma * gamma;
  const std::vector<ChiSquareTerm> terms{{0.0, 1, 0.0}, {alpha, 1, g2}, {2.0 * alpha, 1, 0.0}};
  const ContourIntegrand G(terms, {}, 1.0);
  const auto circle = integrate_circle([&](cplx t) { return G(t); }, cplx(-0.5 * alpha, 0.0), r,
                                       rel_tol);
  auto tail = [&](double u) {
    const double a = alpha + u * u;
    return std::exp(-u * u - g2 / (4.0 * a)) / std::sqrt(a * (2.0 * alpha + u * u));
  };
  const auto ray = integrate_semi_infinite(tail, 0.0, rel_tol);
  const double value = circle.value.real() - (2.0 / kPi) * std::exp(-2.0 * alpha) * ray.value;
  return 2.0 * std::pow(kPi, 1.5) * value;
}

double kent_const(const KentParams& params, double radius_fraction) {
  if (!(params.beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
  if (!(params.kappa >= 0.0)) throw Error(Errc::InvalidArgument, "kappa must be non-negative");
  return std::exp(params.beta) *
         kent_contour_const(params.beta, params.kappa, radius_fraction * params.beta);
}

}  // namespace gchisq
