#include "gchisq/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gchisq/error.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/quadrature.hpp"

namespace gchisq {

namespace {

constexpr double kPi = std::numbers::pi;

struct ImhofTerm {
  double lambda;
  double h;
  double delta;
};

std::vector<ImhofTerm> imhof_terms(const QuadraticFormSpec& spec) {
  std::vector<ImhofTerm> out;
  for (const auto& t : spec.positive) out.push_back({t.lambda(), double(t.n), t.delta()});
  for (const auto& t : spec.negative) out.push_back({-t.lambda(), double(t.n), t.delta()});
  return out;
}

// Last even-column entry of the epsilon table built on `s`.
double wynn_epsilon(const std::vector<double>& s) {
  const std::size_t n = s.size();
  std::vector<double> prev(n + 1, 0.0);  // eps_{-1}
  std::vector<double> cur(s.begin(), s.end());
  double best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t i = 0; i + k < n; ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) return cur[i + 1];
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) best = cur.back();
  }
  return best;
}

}  // namespace

double imhof_survivor(const QuadraticFormSpec& input, double x, double abs_tol) {
  const auto spec = normalize_spec(input);
  const auto terms = imhof_terms(spec);
  double k = 0.0;
  double lmin = std::numeric_limits<double>::infinity();
  double slope0 = -0.5 * x;
  double log_prod_lambda = 0.0;
  for (const auto& t : terms) {
    k += 0.5 * t.h;
    lmin = std::min(lmin, std::abs(t.lambda));
    slope0 += 0.5 * (t.h * t.lambda + t.delta * t.lambda);
    log_prod_lambda += 0.5 * t.h * std::log(std::abs(t.lambda));
  }

  auto integrand = [&](double u) {
    if (u == 0.0) return slope0;
    double theta = -0.5 * x * u;
    double log_rho = 0.0;
    for (const auto& t : terms) {
      const double lu = t.lambda * u;
      const double q = 1.0 + lu * lu;
      theta += 0.5 * (t.h * std::atan(lu) + t.delta * lu / q);
      log_rho += 0.25 * t.h * std::log1p(lu * lu) + 0.5 * t.delta * lu * lu / q;
    }
    return std::sin(theta) / (u * std::exp(log_rho));
  };
  // Truncation bound for the tail beyond U.
  auto bound = [&](double U) {
    double e = 0.0;
    for (const auto& t : terms) {
      const double lu = t.lambda * U;
      e += 0.5 * t.delta * lu * lu / (1.0 + lu * lu);
    }
    return std::exp(-std::log(kPi * k) - k * std::log(U) - log_prod_lambda - e);
  };

  const double A = 8.0 / lmin;
  const auto head = integrate_finite(integrand, 0.0, A, 1e-13, 0.01 * abs_tol);
  double total = head.value;
  const double half_period = std::abs(x) > 0.0 ? 2.0 * kPi / std::abs(x) : 0.0;

  if (bound(A) < 0.01 * abs_tol) {
    // Tail negligible.
  } else if (half_period == 0.0) {
    const auto tail = integrate_semi_infinite(integrand, A, 1e-12, 0.01 * abs_tol, A);
    total += tail.value;
  } else {
    std::vector<double> partial{total};
    double U = A;
    double prev_est = total;
    bool done = false;
    for (int chunk = 0; chunk < 4000 && !done; ++chunk) {
      const auto r = integrate_finite(integrand, U, U + half_period, 1e-13, 1e-3 * abs_tol);
      U += half_period;
      partial.push_back(partial.back() + r.value);
      if (bound(U) < 0.01 * abs_tol) {
        total = partial.back();
        done = true;
        break;
      }
      if (partial.size() >= 8) {
        const std::size_t m = std::min<std::size_t>(partial.size(), 30);
        const std::vector<double> tail(partial.end() - static_cast<long>(m), partial.end());
        const double est = wynn_epsilon(tail);
        if (std::abs(est - prev_est) < 0.01 * abs_tol) {
          total = est;
          done = true;
        }
        prev_est = est;
      }
    }
    if (!done) throw Error(Errc::NoConvergence, "Imhof tail did not converge");
  }
  return 0.5 + total / kPi;
}

double imhof_cdf(const QuadraticFormSpec& spec, double x, double abs_tol) {
  return 1.0 - imhof_survivor(spec, x, abs_tol);
}

McEstimate mc_estimate(const QuadraticFormSpec& input, const std::vector<double>& x_grid,
                       std::int64_t n_samples, std::uint64_t seed, double bandwidth) {
  const auto spec = normalize_spec(input);
  if (n_samples < 1) throw Error(Errc::InvalidArgument, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Draw {
    double sigma;
    double mean;
    int n;
    double sign;
  };
  std::vector<Draw> draws;
  // Each term: n normals of variance 1/(2 theta) whose mean vector has norm gamma / (2 theta).
  auto add = [&](const ChiSquareTerm& t, double sign) {
    const double mean = std::sqrt(t.gamma2) / (2.0 * t.theta * std::sqrt(double(t.n)));
    draws.push_back({std::sqrt(0.5 / t.theta), mean, t.n, sign});
  };
  for (const auto& t : spec.positive) add(t, 1.0);
  for (const auto& t : spec.negative) add(t, -1.0);

  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  for (auto& s : samples) {
    double acc = 0.0;
    for (const auto& d : draws) {
      double part = 0.0;
      for (int j = 0; j < d.n; ++j) {
        const double w = d.mean + d.sigma * normal(rng);
        part += w * w;
      }
      acc += d.sign * part;
    }
    s = acc;
  }
  std::sort(samples.begin(), samples.end());

  McEstimate out;
  out.bandwidth = bandwidth > 0.0 ? bandwidth : 0.02 * std::sqrt(spec.variance());
  const double N = static_cast<double>(n_samples);
  const double h = out.bandwidth;
  for (double x : x_grid) {
    const auto below = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
    const double p = below / N;
    const auto lo = std::upper_bound(samples.begin(), samples.end(), x - h);
    const auto hi = std::upper_bound(samples.begin(), samples.end(), x + h);
    const double q = (hi - lo) / N;
    out.x.push_back(x);
    out.cdf.push_back(p);
    out.cdf_se.push_back(std::sqrt(p * (1.0 - p) / N));
    out.pdf.push_back(q / (2.0 * h));
    out.pdf_se.push_back(std::sqrt(q * (1.0 - q) / N) / (2.0 * h));
  }
  return out;
}

double convolve_pdf_diff(const QuadraticFormSpec& x, const QuadraticFormSpec& y, double z) {
  if (z < 0.0) return convolve_pdf_diff(y, x, -z);
  const auto sx = normalize_spec(x);
  const auto sy = normalize_spec(y);
  if (sx.is_difference() || sy.is_difference()) {
    throw Error(Errc::NotAPositiveCombination, "both parts must be positive combinations");
  }
  const ContourOptions opts{1e-12, true};
  // y = v^2 removes the integrable y^{-1/2} behaviour at the origin.
  auto f = [&](double v) {
    const double y2 = v * v;
    const double fy = pdf(sy, y2, opts).value;
    if (fy == 0.0) return 0.0;
    return pdf(sx, y2 + z, opts).value * fy * 2.0 * v;
  };
  const double scale = std::sqrt(std::max(sy.mean(), 1e-300));
  return integrate_semi_infinite(f, 0.0, 1e-10, 1e-12, scale).value;
}

}  // namespace gchisq
