#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "gchisq/difference.hpp"
#include "gchisq/directional.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/oracles.hpp"
#include "gchisq/quadrature.hpp"
#include "gchisq/spa.hpp"

namespace gchisq::checks {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double value, double truth) {
  if (truth == 0.0) return std::abs(value);
  return std::abs(value - truth) / std::abs(truth);
}

std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::string spec_label(const QuadraticFormSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(4);
  auto list = [&](const std::vector<ChiSquareTerm>& terms) {
    os << "[";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) os << " ";
      os << terms[i].theta << "/" << terms[i].n;
      if (terms[i].gamma2 > 0.0) os << "/" << terms[i].gamma2;
    }
    os << "]";
  };
  list(spec.positive);
  if (spec.is_difference()) {
    os << "-";
    list(spec.negative);
  }
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Regularized lower incomplete gamma P(a, x) by its power series.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(a * std::log(x) - x - std::lgamma(a + 1.0)) * sum;
}

double bessel_i0(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= (0.5 * x) * (0.5 * x) / (double(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Integral of exp(kappa x1 + beta (x2^2 - x3^2)) over S^2 in spherical coordinates:
// trapezoid in the azimuth, adaptive Gauss-Kronrod in the polar angle.
double kent_sphere_quadrature(double beta, double kappa) {
  constexpr int kAzimuth = 128;
  auto polar = [&](double t) {
    const double st = std::sin(t);
    double inner = 0.0;
    for (int k = 0; k < kAzimuth; ++k) {
      const double phi = 2.0 * kPi * k / kAzimuth;
      inner += std::exp(beta * st * st * std::cos(2.0 * phi));
    }
    inner *= 2.0 * kPi / kAzimuth;
    return st * std::exp(kappa * std::cos(t)) * inner;
  };
  return integrate_finite(polar, 0.0, kPi, 1e-13).value;
}

// Integral of a density over the line through x = +-v^2, which absorbs x^{-1/2} behaviour at 0.
double total_mass(const QuadraticFormSpec& spec) {
  const ContourOptions opts{1e-11, true};
  const double scale = std::sqrt(std::max(std::abs(spec.mean()) + std::sqrt(spec.variance()), 1e-3));
  auto right = [&](double v) {
    return 2.0 * v * (spec.is_difference() ? pdf_diff(spec, v * v, opts) : pdf(spec, v * v, opts)).value;
  };
  double total = integrate_semi_infinite(right, 0.0, 1e-10, 1e-12, scale).value;
  if (spec.is_difference()) {
    auto left = [&](double v) { return 2.0 * v * pdf_diff(spec, -v * v, opts).value; };
    total += integrate_semi_infinite(left, 0.0, 1e-10, 1e-12, scale).value;
  }
  return total;
}

double any_cdf(const QuadraticFormSpec& spec, double x, std::optional<double> theta0 = {}) {
  return spec.is_difference() ? cdf_diff(spec, x, theta0).value : cdf(spec, x, theta0).value;
}

double any_pdf(const QuadraticFormSpec& spec, double x) {
  return spec.is_difference() ? pdf_diff(spec, x).value : pdf(spec, x).value;
}

double log_kappa(const QuadraticFormSpec& spec) {
  double lk = 0.0;
  for (const auto& t : spec.positive) lk += 0.5 * t.n * std::log(t.theta) - t.gamma2 / (4.0 * t.theta);
  return lk;
}

}  // namespace

bool SuiteReport::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; });
}

std::size_t SuiteReport::passed() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; }));
}

void SuiteReport::add(std::string case_name, double error, double tol, std::string detail) {
  const bool ok = std::isfinite(error) && error <= tol;
  cases.push_back(CaseResult{std::move(case_name), error, tol, ok, std::move(detail)});
}

void SuiteReport::print(std::ostream& os) const {
  for (const auto& c : cases) {
    os << (c.pass ? "pass " : "FAIL ") << name << ": " << c.name << "  err=" << fmt(c.error, 3)
       << " tol=" << fmt(c.tol, 3);
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  os << name << ": " << passed() << "/" << cases.size() << " passed\n";
}

std::vector<TableCase> table1_cases() {
  auto T = [](double lambda, double n, double delta = 0.0) {
    return term_from_coefficient(lambda, n, delta);
  };
  std::vector<TableCase> out;
  out.push_back(TableCase{
      "row1 (1/3)Q3 - (2/3)Q4",
      normalize_spec({T(0.2, 6), T(0.1, 4), T(0.1 / 3, 2)}, {T(0.4, 2), T(0.2, 4), T(0.2 / 3, 6)}),
      {{-2.0, 0.9102254}, {0.0, 0.4061061}, {2.5, 0.0097598}}});
  out.push_back(TableCase{"row2 (1/2)Q5 - (1/2)Q6",
                          normalize_spec({T(0.35, 6, 6), T(0.15, 2, 2)}, {T(0.35, 1, 6), T(0.15, 1, 2)}),
                          {{-2.0, 0.921792}, {2.0, 0.4778933}, {7.0, 0.0396319}}});
  out.push_back(TableCase{
      "row3 (1/6)Q3 + (1/3)Q6 - (1/6)Q5 - (1/3)Q4",
      normalize_spec({T(0.1, 6), T(0.05, 4), T(0.1 / 6, 2), T(1.4 / 6, 1, 6), T(0.1, 1, 2)},
                     {T(0.7 / 6, 6, 6), T(0.05, 2, 2), T(0.2, 2), T(0.1, 4), T(0.2 / 6, 6)}),
      {{-3.0, 0.9861469}, {0.0, 0.5170232}, {4.0, 0.0152041}}});
  return out;
}

QuadraticFormSpec theta1_spec() {
  return normalize_spec({make_term(5.0 / 6.0, 1), make_term(5.0 / 3.0, 1), make_term(5.0, 1)});
}

QuadraticFormSpec theta2_spec() {
  return normalize_spec({make_term(5.0 / 6.0, 2), make_term(5.0 / 3.0, 2), make_term(5.0, 2)});
}

QuadraticFormSpec random_positive_spec(std::uint64_t seed, bool central, int max_terms) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<int> dof(1, 3);
  std::uniform_real_distribution<double> theta(0.3, 3.0);
  std::uniform_real_distribution<double> gamma2(0.0, 3.0);
  std::bernoulli_distribution noncentral(0.5);
  std::vector<ChiSquareTerm> terms;
  const int p = count(rng);
  for (int i = 0; i < p; ++i) {
    const double g = (!central && noncentral(rng)) ? gamma2(rng) : 0.0;
    terms.push_back(make_term(theta(rng), dof(rng), g));
  }
  return normalize_spec(std::move(terms));
}

QuadraticFormSpec random_difference_spec(std::uint64_t seed, int max_terms) {
  const auto x = random_positive_spec(seed, false, max_terms);
  const auto y = random_positive_spec(seed ^ 0x9e3779b97f4a7c15ULL, false, max_terms);
  return normalize_spec(x.positive, y.positive);
}

double quantile(const QuadraticFormSpec& spec, double p) {
  const double sd = std::sqrt(spec.variance());
  double lo = spec.is_difference() ? spec.mean() - 30.0 * sd : 0.0;
  double hi = spec.mean() + 30.0 * sd;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (any_cdf(spec, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SuiteReport table1() {
  SuiteReport rep{"table1", {}};
  for (const auto& tc : table1_cases()) {
    for (const auto& [s, ref] : tc.survivor_at) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = survivor_diff(tc.spec, s);
      const double dt = seconds_since(t0);
      const double err = std::abs(r.value - ref);
      rep.add(tc.label + " s=" + fmt(s), dt < 1.0 ? err : INFINITY, 1e-6,
              "value=" + fmt(r.value, 9) + " ref=" + fmt(ref, 8) + " time=" + fmt(dt * 1e3, 3) + "ms");
    }
  }
  return rep;
}

SuiteReport closed_forms() {
  SuiteReport rep{"closed-forms", {}};
  const auto t0 = std::chrono::steady_clock::now();
  for (double theta : {0.35, 1.0, 2.5}) {
    for (int n = 1; n <= 8; ++n) {
      const auto spec = normalize_spec({make_term(theta, n)});
      const double a = 0.5 * n;
      double pdf_err = 0.0;
      double cdf_err = 0.0;
      // Points spread over the bulk of the distribution, in units of the mean.
      for (double u : {0.1, 0.3, 0.7, 1.0, 1.6, 2.5, 4.0}) {
        const double x = u * n / (2.0 * theta);
        const double f = std::exp(a * std::log(theta) + (a - 1.0) * std::log(x) - theta * x - std::lgamma(a));
        const double F = gamma_p(a, theta * x);
        pdf_err = std::max(pdf_err, rel_err(pdf(spec, x).value, f));
        cdf_err = std::max(cdf_err, rel_err(cdf(spec, x).value, F));
      }
      const std::string label = "gamma theta=" + fmt(theta) + " n=" + std::to_string(n);
      rep.add(label + " pdf", pdf_err, 1e-10);
      rep.add(label + " cdf", cdf_err, 1e-10);
    }
  }
  const std::vector<std::vector<double>> rate_sets{
      {0.5, 1.5}, {0.4, 1.0, 2.2}, {0.3, 0.8, 1.7, 2.9}, {0.6, 0.9, 1.4, 2.0, 3.1}};
  for (const auto& rates : rate_sets) {
    std::vector<ChiSquareTerm> terms;
    for (double r : rates) terms.push_back(make_term(r, 2));
    const auto spec = normalize_spec(terms);
    const Eigen::VectorXd pos = Eigen::Map<const Eigen::VectorXd>(rates.data(), rates.size());
    double pdf_err = 0.0;
    double sf_err = 0.0;
    for (double u : {0.2, 0.6, 1.0, 1.5, 2.5, 4.0}) {
      const double x = u * spec.mean();
      pdf_err = std::max(pdf_err, rel_err(pdf(spec, x).value, hypoexp_diff_pdf(pos, {}, x)));
      sf_err = std::max(sf_err, rel_err(survivor(spec, x).value, hypoexp_diff_survivor(pos, {}, x)));
    }
    const std::string label = "hypoexponential p=" + std::to_string(rates.size());
    rep.add(label + " pdf", pdf_err, 1e-9);
    rep.add(label + " survivor", sf_err, 1e-9);
  }
  {
    const std::vector<double> a{0.5, 1.3, 2.1};
    const std::vector<double> b{0.7, 1.9};
    std::vector<ChiSquareTerm> x;
    std::vector<ChiSquareTerm> y;
    for (double r : a) x.push_back(make_term(r, 2));
    for (double r : b) y.push_back(make_term(r, 2));
    const auto spec = normalize_spec(x, y);
    const Eigen::VectorXd pos = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
    const Eigen::VectorXd neg = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    double pdf_err = 0.0;
    double sf_err = 0.0;
    for (double z : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.5, 4.0}) {
      pdf_err = std::max(pdf_err, rel_err(pdf_diff(spec, z).value, hypoexp_diff_pdf(pos, neg, z)));
      sf_err = std::max(sf_err, rel_err(survivor_diff(spec, z).value, hypoexp_diff_survivor(pos, neg, z)));
    }
    rep.add("hypoexponential difference pdf", pdf_err, 1e-9);
    rep.add("hypoexponential difference survivor", sf_err, 1e-9);
  }
  const double dt = seconds_since(t0);
  rep.add("suite runtime (s)", dt, 5.0);
  return rep;
}

SuiteReport route_equivalence(std::uint64_t seed) {
  SuiteReport rep{"route-equivalence", {}};
  std::uint64_t s = seed;
  for (int found = 0; found < 20; ++s) {
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_int_distribution<int> dof(1, 2);
    std::uniform_real_distribution<double> theta(0.3, 3.0);
    std::vector<ChiSquareTerm> terms;
    const int p = count(rng);
    for (int i = 0; i < p; ++i) terms.push_back(make_term(theta(rng), dof(rng)));
    const auto spec = normalize_spec(terms);
    if (!central_simple_applicable(spec) || spec.total_dof() < 2) continue;
    ++found;
    double worst = 0.0;
    for (double u : {0.3, 1.0, 2.5}) {
      const double x = u * spec.mean();
      const double a = pdf_central_simple(spec, x, 1e-12).value;
      const double b = pdf_general_contour(spec, x, ContourOptions{1e-12, false}).value;
      worst = std::max(worst, rel_err(a, b));
    }
    rep.add("central " + spec_label(spec), worst, 1e-9);
  }
  const std::vector<double> all{0.3, 1.1, 2.4, 3.7};
  for (int k = 2; k <= 4; ++k) {
    Eigen::VectorXd th(k);
    for (int i = 0; i < k; ++i) th[i] = all[static_cast<std::size_t>(i)];
    const double cb = complex_bingham_const(th);
    const double b = bingham_const(BinghamParams{th, Eigen::VectorXi::Constant(k, 2)});
    rep.add("complex Bingham k=" + std::to_string(k) + " vs doubled Bingham", rel_err(cb, b), 1e-9,
            "value=" + fmt(cb, 12));
  }
  return rep;
}

SuiteReport identities(std::uint64_t seed) {
  SuiteReport rep{"identities", {}};
  // cdf invariance in theta0.
  for (int i = 0; i < 6; ++i) {
    const auto spec = random_positive_spec(seed + 100 + i, false, 5);
    for (double u : {0.5, 1.0, 2.0}) {
      const double x = u * spec.mean();
      const double ref = cdf(spec, x).value;
      double worst = 0.0;
      for (double th0 : {0.25, 1.0, 4.0}) worst = std::max(worst, rel_err(cdf(spec, x, th0).value, ref));
      rep.add("theta0 invariance " + spec_label(spec) + " x=" + fmt(x, 4), worst, 1e-7);
    }
  }
  for (int i = 0; i < 3; ++i) {
    auto spec = random_difference_spec(seed + 200 + i, 3);
    // Room for theta0 = 4 on whichever side carries the auxiliary term.
    for (auto& t : spec.positive) t.theta += 4.5;
    for (auto& t : spec.negative) t.theta += 4.5;
    spec = normalize_spec(spec);
    for (double z : {spec.mean() - std::sqrt(spec.variance()), spec.mean(), spec.mean() + std::sqrt(spec.variance())}) {
      const double ref = cdf_diff(spec, z).value;
      double worst = 0.0;
      for (double th0 : {0.25, 1.0, 4.0}) worst = std::max(worst, rel_err(cdf_diff(spec, z, th0).value, ref));
      rep.add("theta0 invariance " + spec_label(spec) + " z=" + fmt(z, 4), worst, 1e-7);
    }
  }
  // Rescale and shift.
  std::mt19937_64 rng(seed + 300);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto spec = random_positive_spec(seed + 300 + i, false, 5);
    const double s = 0.5 + 2.5 * unit(rng);
    const double c = -1.0 + (0.9 * spec.min_theta() + 1.0) * unit(rng);
    const auto rs = rescale_shift(spec, s, c);
    const double lhs = pdf(spec, s).value;
    const double rhs = rs.prefactor * pdf(rs.spec, 1.0).value;
    rep.add("rescale/shift " + spec_label(spec) + " s=" + fmt(s, 4) + " c=" + fmt(c, 4), rel_err(lhs, rhs), 1e-8);
    const auto back = rescale_shift(rs.spec, 1.0 / s, -s * c);
    double spec_err = 0.0;
    for (std::size_t k = 0; k < spec.positive.size(); ++k) {
      spec_err = std::max(spec_err, rel_err(back.spec.positive[k].theta, spec.positive[k].theta));
      if (spec.positive[k].gamma2 > 0.0) {
        spec_err = std::max(spec_err, rel_err(back.spec.positive[k].gamma2, spec.positive[k].gamma2));
      }
    }
    const double prod_err = rel_err(rs.prefactor * back.prefactor, std::exp(c * (1.0 - s)));
    rep.add("rescale/shift round trip " + spec_label(spec), std::max(spec_err, prod_err), 1e-12);
  }
  // Multiplicity lift against finite differences of f / kappa.
  const std::vector<QuadraticFormSpec> lift_specs{
      normalize_spec({make_term(0.7, 1), make_term(1.3, 1), make_term(2.2, 1)}),
      normalize_spec({make_term(0.5, 1), make_term(0.9, 1), make_term(1.6, 1), make_term(2.8, 1)}),
      normalize_spec({make_term(0.6, 1, 1.5), make_term(1.2, 1), make_term(2.0, 2, 0.8)}),
      normalize_spec({make_term(0.8, 2), make_term(1.5, 1), make_term(2.5, 3)})};
  for (const auto& spec : lift_specs) {
    for (std::size_t j = 0; j < spec.positive.size(); ++j) {
      if (spec.positive[j].gamma2 > 0.0) continue;
      const auto lift = multiplicity_lift(spec, j, 1e-12);
      for (double x : {0.6, 1.5, 3.0}) {
        const double h = 1e-4;
        auto ratio = [&](double d) {
          auto sp = spec;
          sp.positive[j].theta += d;
          return pdf(sp, x, ContourOptions{1e-13, true}).value / std::exp(log_kappa(sp));
        };
        const double deriv = (ratio(h) - ratio(-h)) / (2.0 * h);
        const double kappa_lift = std::exp(log_kappa(spec)) * spec.positive[j].theta;
        const double fd = kappa_lift * (-2.0 / spec.positive[j].n) * deriv;
        rep.add("lift " + spec_label(spec) + " j=" + std::to_string(j) + " x=" + fmt(x),
                rel_err(lift(x).value, fd), 1e-5, lift.analytic() ? "analytic" : "lifted spec");
      }
    }
  }
  // Two unit-dof thetas a distance 1e-6 apart against the merged dof-2 pole.
  const double eps = 1e-6;
  const std::vector<std::pair<QuadraticFormSpec, QuadraticFormSpec>> pairs{
      {normalize_spec({make_term(1.0, 1), make_term(1.0 + eps, 1), make_term(2.5, 1)}),
       normalize_spec({make_term(1.0, 2), make_term(2.5, 1)})},
      {normalize_spec({make_term(0.8, 1), make_term(2.0, 1), make_term(2.0 + eps, 1)}),
       normalize_spec({make_term(0.8, 1), make_term(2.0, 2)})},
      {normalize_spec({make_term(0.5, 1), make_term(1.2, 1), make_term(1.2 + eps, 1), make_term(3.0, 1)}),
       normalize_spec({make_term(0.5, 1), make_term(1.2, 2), make_term(3.0, 1)})}};
  for (const auto& [split, merged] : pairs) {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 3.0}) worst = std::max(worst, rel_err(pdf(split, x).value, pdf(merged, x).value));
    rep.add("type-1 limit " + spec_label(merged), worst, 1e-4);
  }
  return rep;
}

SuiteReport oracles(std::uint64_t seed, std::int64_t mc_samples) {
  SuiteReport rep{"oracles", {}};
  for (int i = 0; i < 30; ++i) {
    const auto spec = random_difference_spec(seed + 1000 + i, 4);
    const double sd = std::sqrt(spec.variance());
    double worst = 0.0;
    for (double u : {-1.5, 0.0, 1.0, 2.5}) {
      const double z = spec.mean() + u * sd;
      worst = std::max(worst, std::abs(cdf_diff(spec, z).value - imhof_cdf(spec, z)));
    }
    rep.add("cdf vs Imhof " + spec_label(spec), worst, 1e-6);
  }
  for (int i = 0; i < 4; ++i) {
    const auto spec = random_difference_spec(seed + 2000 + i, 3);
    const QuadraticFormSpec x{spec.positive, {}};
    const QuadraticFormSpec y{spec.negative, {}};
    double worst = 0.0;
    for (double u : {-1.0, 0.0, 0.7, 2.0}) {
      const double z = spec.mean() + u * std::sqrt(spec.variance());
      worst = std::max(worst, std::abs(pdf_diff(spec, z).value - convolve_pdf_diff(x, y, z)));
    }
    rep.add("pdf_diff vs convolution " + spec_label(spec), worst, 1e-6);
  }
  if (mc_samples > 0) {
    const std::vector<QuadraticFormSpec> mc_specs{table1_cases()[1].spec,
                                                  random_positive_spec(seed + 3000, false, 4)};
    for (const auto& spec : mc_specs) {
      const double sd = std::sqrt(spec.variance());
      std::vector<double> grid;
      for (double u : {-1.0, -0.3, 0.4, 1.2, 2.5}) grid.push_back(spec.mean() + u * sd);
      const auto mc = mc_estimate(spec, grid, mc_samples, seed);
      double worst_cdf = 0.0;
      double worst_pdf = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        worst_cdf = std::max(worst_cdf, std::abs(any_cdf(spec, grid[k]) - mc.cdf[k]) / mc.cdf_se[k]);
        worst_pdf = std::max(worst_pdf, std::abs(any_pdf(spec, grid[k]) - mc.pdf[k]) / mc.pdf_se[k]);
      }
      rep.add("Monte Carlo cdf (in SE) " + spec_label(spec), worst_cdf, 4.0);
      rep.add("Monte Carlo pdf (in SE) " + spec_label(spec), worst_pdf, 4.0);
    }
  }
  return rep;
}

SuiteReport normalization(std::uint64_t seed) {
  SuiteReport rep{"normalization", {}};
  for (int i = 0; i < 20; ++i) {
    const auto spec = random_positive_spec(seed + 4000 + i, false, 6);
    rep.add("mass " + spec_label(spec), std::abs(total_mass(spec) - 1.0), 1e-6);
  }
  for (int i = 0; i < 10; ++i) {
    const auto spec = random_difference_spec(seed + 5000 + i, 3);
    rep.add("mass " + spec_label(spec), std::abs(total_mass(spec) - 1.0), 1e-6);
  }
  return rep;
}

SuiteReport directional() {
  SuiteReport rep{"directional", {}};
  {
    const double b = bingham_const(BinghamParams{Eigen::Vector2d(0.0, 2.0), Eigen::Vector2i(1, 1)});
    const double ref = 2.0 * kPi * std::exp(-1.0) * bessel_i0(1.0);
    rep.add("Bingham S^1 (0,2) vs 2 pi e^-1 I0(1)", rel_err(b, ref), 1e-8, "value=" + fmt(b, 12));
  }
  {
    const double b = bingham_const(BinghamParams::unit(Eigen::Vector3d(2.0, 2.0, 2.0)));
    rep.add("Bingham S^2 (2,2,2) vs 4 pi e^-2", rel_err(b, 4.0 * kPi * std::exp(-2.0)), 1e-10, "value=" + fmt(b, 12));
  }
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double kappa : {0.5, 1.0, 2.0}) {
      const double k = kent_const(KentParams{beta, kappa});
      const double ref = kent_sphere_quadrature(beta, kappa);
      rep.add("Kent beta=" + fmt(beta) + " kappa=" + fmt(kappa) + " vs sphere quadrature", rel_err(k, ref), 1e-6,
              "value=" + fmt(k, 12));
      const double k2 = kent_const(KentParams{beta, kappa}, 0.55);
      const double k3 = kent_const(KentParams{beta, kappa}, 0.95);
      rep.add("Kent beta=" + fmt(beta) + " kappa=" + fmt(kappa) + " radius invariance",
              std::max(rel_err(k2, k), rel_err(k3, k)), 1e-8);
    }
  }
  {
    const Eigen::Vector3d g = fisher_so3_grad(Eigen::Vector3d::Zero());
    rep.add("SO(3) gradient at 0", g.cwiseAbs().maxCoeff(), 1e-8);
    rep.add("SO(3) constant at 0 vs pi^2", rel_err(fisher_so3_const(Eigen::Vector3d::Zero()), kPi * kPi), 1e-10);
  }
  for (const Eigen::Vector3d& phi : {Eigen::Vector3d(0.3, -0.2, 0.5), Eigen::Vector3d(1.0, 2.0, 3.0),
                                    Eigen::Vector3d(-1.5, 0.4, 2.2)}) {
    const Eigen::Vector3d g = fisher_so3_grad(phi);
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d a = phi;
      Eigen::Vector3d b = phi;
      a[i] += h;
      b[i] -= h;
      const double fd = (std::log(fisher_so3_const(a)) - std::log(fisher_so3_const(b))) / (2.0 * h);
      worst = std::max(worst, rel_err(g[i], fd));
    }
    rep.add("SO(3) gradient vs finite differences phi=(" + fmt(phi[0]) + "," + fmt(phi[1]) + "," + fmt(phi[2]) + ")",
            worst, 1e-5);
  }
  return rep;
}

SuiteReport saddlepoint() {
  SuiteReport rep{"saddlepoint", {}};
  const auto spec = theta1_spec();
  const CgfContext ctx(spec);
  const double lo = quantile(spec, 0.05);
  const double hi = quantile(spec, 0.95);
  double pdf_err = 0.0;
  double via_err = 0.0;
  double lr_err = 0.0;
  constexpr int kPoints = 60;
  for (int k = 0; k < kPoints; ++k) {
    const double s = lo + (hi - lo) * k / (kPoints - 1);
    const double f = pdf(spec, s).value;
    const double F = cdf(spec, s).value;
    pdf_err = std::max(pdf_err, rel_err(spa_pdf(ctx, s), f));
    via_err = std::max(via_err, rel_err(spa_cdf_via_pdf(ctx, s), F));
    lr_err = std::max(lr_err, rel_err(spa_cdf(ctx, s), F));
  }
  const std::string range = "on [" + fmt(lo, 6) + ", " + fmt(hi, 6) + "]";
  rep.add("theta1 SPA pdf relative error", pdf_err, 0.05, range);
  rep.add("theta1 SPA cdf via density relative error", via_err, 0.05, range);
  rep.add("theta1 Lugannani-Rice cdf relative error", lr_err, 0.05, range);
  const auto exp1 = normalize_spec({make_term(1.0, 2)});
  const CgfContext ectx(exp1);
  double ratio_err = 0.0;
  for (double s : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    ratio_err = std::max(ratio_err, rel_err(spa_pdf(ectx, s) / std::exp(-s), std::exp(1.0) / std::sqrt(2.0 * kPi)));
  }
  rep.add("Exp(1) SPA/exact ratio vs e/sqrt(2 pi)", ratio_err, 1e-10);
  return rep;
}

}  // namespace gchisq::checks
