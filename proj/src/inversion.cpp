#include "gchisq/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from [a, b] to the nearest singular point outside it.
double gap_outside(const std::vector<double>& pts, double a, double b) {
  double gap = kInf;
  for (double p : pts) {
    if (p < a) gap = std::min(gap, a - p);
    if (p > b) gap = std::min(gap, p - b);
  }
  return gap;
}

// Radius beyond which the exponential and the essential factors balance on a circle.
// Largest circle used before switching to a rectangle (in units of 1/s).
constexpr double kMaxCircleRadius = 6.0;

double balanced_radius(double gamma2) { return std::max(0.5, 0.5 * std::sqrt(gamma2)); }

double max_gamma2(const QuadraticFormSpec& spec, std::initializer_list<std::size_t> idx) {
  double g = 0.0;
  for (auto i : idx) g = std::max(g, spec.positive[i].gamma2);
  return g;
}

std::vector<ChiSquareTerm> without(std::span<const ChiSquareTerm> terms,
                                   std::initializer_list<std::size_t> skip) {
  std::vector<ChiSquareTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (std::find(skip.begin(), skip.end(), i) == skip.end()) out.push_back(terms[i]);
  }
  return out;
}

double log_kappa(std::span<const ChiSquareTerm> terms) {
  double lk = 0.0;
  for (const auto& t : terms) lk += 0.5 * t.n * std::log(t.theta) - t.gamma2 / (4.0 * t.theta);
  return lk;
}

QuadraticFormSpec scaled_by(const QuadraticFormSpec& spec, double s) {
  QuadraticFormSpec out = spec;
  for (auto& t : out.positive) {
    t.theta *= s;
    t.gamma2 *= s;
  }
  for (auto& t : out.negative) {
    t.theta *= s;
    t.gamma2 *= s;
  }
  return out;
}

// Sum over `others` of -(n/2) log|theta_i - t|, with theta_i - t supplied by `diff`.
template <typename Diff>
double log_abs_others(std::span<const ChiSquareTerm> others, Diff diff) {
  double acc = 0.0;
  for (std::size_t i = 0; i < others.size(); ++i) {
    acc -= 0.5 * others[i].n * std::log(std::abs(diff(i)));
  }
  return acc;
}

bool all_central(const QuadraticFormSpec& spec) {
  for (const auto& t : spec.positive) {
    if (!t.central()) return false;
  }
  for (const auto& t : spec.negative) {
    if (!t.central()) return false;
  }
  return true;
}

bool all_even(const QuadraticFormSpec& spec) {
  for (const auto& t : spec.positive) {
    if (t.n % 2 != 0) return false;
  }
  return true;
}

// (-1)^{(m-1)/2}, m the dof at or below theta: the sign of -Im G on the upper side of the cut.
double cut_sign(const QuadraticFormSpec& spec, double theta) {
  int m = 0;
  for (const auto& t : spec.positive) {
    if (t.theta <= theta) m += t.n;
  }
  return ((m - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
}

void require_positive_only(const QuadraticFormSpec& spec) {
  if (spec.positive.empty()) throw Error(Errc::EmptyPositiveList, "empty positive list");
  if (spec.is_difference()) {
    throw Error(Errc::NotAPositiveCombination, "use the difference functions for X - Y");
  }
}

// Density at the origin: infinite below 2 dof, kappa at exactly 2, zero above.
EvalResult pdf_at_zero(const QuadraticFormSpec& spec) {
  const int n = spec.total_dof();
  EvalResult r;
  r.route = Route::ClosedForm;
  if (n < 2) r.value = kInf;
  if (n == 2) r.value = std::exp(log_kappa(spec.positive));
  return r;
}

}  // namespace

const char* to_string(Route route) noexcept {
  switch (route) {
    case Route::CentralSimple:
      return "central-simple";
    case Route::GeneralContour:
      return "general-contour";
    case Route::ClosedForm:
      return "closed-form";
  }
  return "unknown";
}

std::string ContourPiece::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::RealSegment:
      os << "segment[" << lo << "," << hi << "]";
      break;
    case Kind::Circle:
      os << "circle(c=" << center << ",r=" << radius << ")";
      break;
    case Kind::KeyholeRays:
      os << "keyhole(theta=" << lo << ",nu=" << nu << ",right=" << right << ")";
      break;
    case Kind::Box:
      os << "box(" << left << "," << right << ",nu=" << nu << ")";
      break;
    case Kind::SemiInfinite:
      os << "ray[" << lo << ",inf)";
      break;
    case Kind::Residue:
      os << "residue(" << lo << ")";
      break;
  }
  return os.str();
}

bool ContourPlan::residues_only() const {
  return std::all_of(pieces.begin(), pieces.end(),
                     [](const ContourPiece& p) { return p.kind == ContourPiece::Kind::Residue; });
}

std::string ContourPlan::describe() const {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out += " + ";
    out += p.describe();
  }
  return out;
}

ContourPlan plan_contour(const QuadraticFormSpec& spec, const ContourOptions& opts,
                         std::optional<std::size_t> protected_index) {
  using Kind = ContourPiece::Kind;
  const auto layout = branch_layout(spec);
  const auto& terms = spec.positive;

  // Components of the singular set of g on the t axis, ordered left to right.
  struct Component {
    double left;
    double right;
    double gamma2;
    bool unbounded = false;
    bool collapsible = false;
    bool residue = false;
    bool locked = false;  // never absorbed into a neighbour
    std::size_t members = 1;
    std::size_t index = 0;
  };
  std::vector<Component> comps;
  if (layout.unbounded_cut) {
    const auto& cut = *layout.unbounded_cut;
    const auto& a = terms[cut.index];
    Component c{-kInf, -cut.start, a.gamma2};
    c.unbounded = true;
    c.index = cut.index;
    c.collapsible = opts.collapse_central_cuts && a.central() && a.n == 1 && cut.interior_poles.empty();
    for (const auto& pole : cut.interior_poles) c.gamma2 = std::max(c.gamma2, terms[pole.index].gamma2);
    comps.push_back(c);
  }
  for (const auto& cut : layout.finite_cuts) {
    const auto& a = terms[cut.left_index];
    const auto& b = terms[cut.right_index];
    Component c{-cut.right, -cut.left, max_gamma2(spec, {cut.left_index, cut.right_index})};
    c.index = cut.left_index;
    c.collapsible = opts.collapse_central_cuts && a.central() && b.central() && a.n == 1 &&
                    b.n == 1 && cut.interior_poles.empty();
    for (const auto& pole : cut.interior_poles) c.gamma2 = std::max(c.gamma2, terms[pole.index].gamma2);
    comps.push_back(c);
  }
  for (const auto& pole : layout.isolated_even_poles) {
    Component c{-pole.theta, -pole.theta, terms[pole.index].gamma2};
    c.index = pole.index;
    c.residue = !pole.noncentral;
    c.locked = protected_index == pole.index;
    comps.push_back(c);
  }
  std::sort(comps.begin(), comps.end(),
            [](const Component& x, const Component& y) { return x.right < y.right; });

  // A non-central component keeps its contour at least gamma2/40 away so that the essential
  // factor stays below e^10; neighbours closer than that are enclosed together with it.
  auto needed = [](double g2) { return g2 / 40.0; };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i + 1 < comps.size() && !changed; ++i) {
      auto& a = comps[i];
      auto& b = comps[i + 1];
      if (a.locked || b.locked) continue;
      const double gap = b.left - a.right;
      if (0.4 * gap < needed(std::max(a.gamma2, b.gamma2))) {
        a.right = b.right;
        a.gamma2 = std::max(a.gamma2, b.gamma2);
        a.members += b.members;
        a.collapsible = false;
        a.residue = false;
        comps.erase(comps.begin() + static_cast<long>(i) + 1);
        changed = true;
      }
    }
  }

  std::vector<double> pts;  // every singular point, including the poles of g'(-t)
  for (const auto& c : comps) {
    pts.push_back(c.right);
    if (std::isfinite(c.left)) pts.push_back(c.left);
  }
  for (const auto& t : spec.negative) pts.push_back(t.theta);

  ContourPlan plan;
  for (const auto& c : comps) {
    ContourPiece p{};
    p.index = c.index;
    const bool single = c.members == 1;
    if (single && c.residue) {
      p.kind = Kind::Residue;
      p.lo = -c.right;
    } else if (single && c.collapsible && !c.unbounded) {
      p.kind = Kind::RealSegment;
      p.lo = -c.right;
      p.hi = -c.left;
    } else if (single && c.collapsible) {
      p.kind = Kind::SemiInfinite;
      p.lo = -c.right;
    } else if (c.unbounded) {
      double gap = kInf;
      for (double q : pts) {
        if (q > c.right) gap = std::min(gap, q - c.right);
      }
      const double want = std::max(balanced_radius(c.gamma2), needed(c.gamma2));
      p.kind = Kind::KeyholeRays;
      p.lo = -c.right;
      p.right = c.right + std::min(0.5 * gap, std::max(1.0, want));
      p.nu = std::max(std::min(gap, 1.0), want);
    } else {
      const double half = 0.5 * (c.right - c.left);
      const double gap = gap_outside(pts, c.left, c.right);
      const double want = std::max({balanced_radius(c.gamma2), needed(c.gamma2), 0.5 * half});
      p.kind = Kind::Circle;
      p.lo = -c.right;
      p.hi = -c.left;
      p.center = 0.5 * (c.left + c.right);
      p.radius = half + (std::isfinite(gap) ? std::min(0.4 * gap, want) : want);
      // A wide circle reaches far to the right where e^t dwarfs the result; a rectangle
      // hugging the group keeps that excess to the same margin as the keyhole.
      const double margin = std::max(1.0, std::max(balanced_radius(c.gamma2), needed(c.gamma2)));
      if (p.radius > kMaxCircleRadius && p.radius - half > margin + 2.0) {
        double gap_left = kInf;
        double gap_right = kInf;
        for (double q : pts) {
          if (q < c.left) gap_left = std::min(gap_left, c.left - q);
          if (q > c.right) gap_right = std::min(gap_right, q - c.right);
        }
        p.kind = Kind::Box;
        p.left = c.left - std::min(0.5 * gap_left, margin);
        p.right = c.right + std::min(0.5 * gap_right, margin);
        p.nu = margin;
      }
    }
    plan.pieces.push_back(p);
  }
  return plan;
}

double central_residue(const QuadraticFormSpec& spec, std::size_t index, double s,
                       double log_scale) {
  const auto& pole = spec.positive.at(index);
  if (!pole.central() || pole.n % 2 != 0) {
    throw Error(Errc::InvalidArgument, "residue needs a central term of even dof");
  }
  const int m = pole.n / 2;
  const double th = pole.theta;
  const auto others = without(spec.positive, {index});

  double log_mod = log_scale - s * th;
  double arg = 0.0;
  accumulate_log_g(others, cplx(0.0, 0.0), log_mod, arg, th);
  if (!spec.negative.empty()) accumulate_log_g(spec.negative, cplx(0.0, -0.0), log_mod, arg, -th);
  const double f0 = std::exp(log_mod) * std::cos(arg);
  if (m == 1) return f0;

  // Taylor coefficients of L' = (log F)' at the pole, then of F itself.
  std::vector<double> ell(m - 1, 0.0);
  ell[0] = s;
  for (int j = 0; j < m - 1; ++j) {
    const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    for (const auto& t : others) {
      const double d = t.theta - th;
      ell[j] -= 0.5 * t.n * sgn * std::pow(d, -j - 1);
      if (t.gamma2 != 0.0) ell[j] -= 0.25 * t.gamma2 * sgn * (j + 1) * std::pow(d, -j - 2);
    }
    for (const auto& t : spec.negative) {
      const double e = t.theta + th;
      ell[j] += 0.5 * t.n * std::pow(e, -j - 1);
      if (t.gamma2 != 0.0) ell[j] += 0.25 * t.gamma2 * (j + 1) * std::pow(e, -j - 2);
    }
  }
  std::vector<double> a(m, 0.0);
  a[0] = f0;
  for (int k = 0; k + 1 < m; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += ell[j] * a[k - j];
    a[k + 1] = acc / (k + 1);
  }
  return a[m - 1];
}

namespace {

// Largest log |G| over a few points of the piece's contour.
double probe_log_abs(const ContourPiece& piece, const ContourIntegrand& G, double s) {
  using Kind = ContourPiece::Kind;
  double m = -kInf;
  auto take = [&](double anchor, cplx offset) { m = std::max(m, G.log_abs_at_offset(anchor, offset)); };
  switch (piece.kind) {
    case Kind::Residue:
      break;
    case Kind::RealSegment:
      for (int k = 1; k < 8; ++k) take(piece.lo, cplx(-(piece.hi - piece.lo) * k / 8.0, 0.0));
      break;
    case Kind::SemiInfinite:
      for (double u : {0.05, 0.25, 0.5, 1.0, 2.0}) take(piece.lo, cplx(-u / std::max(s, 1e-300), 0.0));
      break;
    case Kind::Circle:
      for (int k = 0; k < 16; ++k) {
        take(0.0, cplx(piece.center, 0.0) + std::polar(piece.radius, 2.0 * kPi * k / 16.0));
      }
      break;
    case Kind::Box:
      for (int k = 0; k <= 8; ++k) {
        take(0.0, cplx(piece.left + (piece.right - piece.left) * k / 8.0, piece.nu));
        take(0.0, cplx(piece.left, piece.nu * k / 8.0));
        take(0.0, cplx(piece.right, piece.nu * k / 8.0));
      }
      break;
    case Kind::KeyholeRays:
      for (int k = 0; k <= 8; ++k) {
        take(0.0, cplx(piece.right - std::ldexp(piece.nu, k - 4), piece.nu));
        take(0.0, cplx(piece.right, piece.nu * k / 8.0));
      }
      break;
  }
  return m;
}

PieceValue evaluate_piece_scaled(const ContourPiece& piece, const QuadraticFormSpec& spec, double s,
                                 double log_scale, double rel_tol) {
  using Kind = ContourPiece::Kind;
  const ContourIntegrand G(spec.positive, spec.negative, s, log_scale);
  PieceValue out;
  switch (piece.kind) {
    case Kind::Residue: {
      out.value = central_residue(spec, piece.index, s, log_scale);
      out.abs_err = 1e-15 * std::abs(out.value);
      out.n_evals = 1;
      break;
    }
    case Kind::RealSegment: {
      // -(1/pi) int Im G(x + i0) dx over [-hi, -lo], each half anchored at its own endpoint.
      const double lo = piece.lo;
      const double hi = piece.hi;
      const double alpha = hi - lo;
      auto near_lo = [&](double u) {
        const double su = std::sin(u);
        const double cu = std::cos(u);
        return -G.at_offset(lo, cplx(-alpha * su * su, 0.0)).imag() * 2.0 * alpha * su * cu;
      };
      auto near_hi = [&](double u) {
        const double su = std::sin(u);
        const double cu = std::cos(u);
        return -G.at_offset(hi, cplx(alpha * cu * cu, 0.0)).imag() * 2.0 * alpha * su * cu;
      };
      const auto r1 = integrate_finite(near_lo, 0.0, 0.25 * kPi, rel_tol);
      const auto r2 = integrate_finite(near_hi, 0.25 * kPi, 0.5 * kPi, rel_tol);
      out.value = (r1.value + r2.value) / kPi;
      out.abs_err = (r1.abs_err + r2.abs_err) / kPi;
      out.n_evals = r1.n_evals + r2.n_evals;
      break;
    }
    case Kind::SemiInfinite: {
      const double th = piece.lo;
      auto f = [&](double u) { return -G.at_offset(th, cplx(-u * u, 0.0)).imag() * 2.0 * u; };
      const double scale = s > 0.0 ? 1.0 / std::sqrt(s) : 1.0;
      const auto r = integrate_semi_infinite(f, 0.0, rel_tol, 0.0, scale);
      out.value = r.value / kPi;
      out.abs_err = r.abs_err / kPi;
      out.n_evals = r.n_evals;
      break;
    }
    case Kind::Circle: {
      auto f = [&](cplx t) { return G(t); };
      const auto r = integrate_circle(f, cplx(piece.center, 0.0), piece.radius, rel_tol);
      out.value = r.value.real();
      out.abs_err = r.abs_err;
      out.n_evals = r.n_evals;
      break;
    }
    case Kind::Box: {
      // (1/pi) [-int Im G(x + i nu) dx + int_0^nu Re G(R + iy) dy - int_0^nu Re G(L + iy) dy]
      const double L = piece.left;
      const double R = piece.right;
      const double nu = piece.nu;
      auto line = [&](double x) { return -G(cplx(x, nu)).imag(); };
      auto right_side = [&](double y) { return G(cplx(R, y)).real(); };
      auto left_side = [&](double y) { return -G(cplx(L, y)).real(); };
      const auto r1 = integrate_finite(line, L, R, rel_tol);
      const auto r2 = integrate_finite(right_side, 0.0, nu, rel_tol);
      const auto r3 = integrate_finite(left_side, 0.0, nu, rel_tol);
      out.value = (r1.value + r2.value + r3.value) / kPi;
      out.abs_err = (r1.abs_err + r2.abs_err + r3.abs_err) / kPi;
      out.n_evals = r1.n_evals + r2.n_evals + r3.n_evals;
      break;
    }
    case Kind::KeyholeRays: {
      const double R = piece.right;
      const double nu = piece.nu;
      auto line = [&](double v) { return -G(cplx(R - v, nu)).imag(); };
      auto side = [&](double y) { return G(cplx(R, y)).real(); };
      const double scale = s > 0.0 ? std::max(1.0 / s, nu) : std::max(1.0, nu);
      const auto r1 = integrate_semi_infinite(line, 0.0, rel_tol, 0.0, scale);
      const auto r2 = integrate_finite(side, 0.0, nu, rel_tol);
      out.value = (r1.value + r2.value) / kPi;
      out.abs_err = (r1.abs_err + r2.abs_err) / kPi;
      out.n_evals = r1.n_evals + r2.n_evals;
      break;
    }
  }
  return out;
}

}  // namespace

PieceValue evaluate_piece(const ContourPiece& piece, const QuadraticFormSpec& spec, double s,
                          double log_scale, double rel_tol) {
  if (piece.kind == ContourPiece::Kind::Residue) {
    return evaluate_piece_scaled(piece, spec, s, log_scale, rel_tol);
  }
  // Integrate with the contour's peak modulus near 1 so that far tails neither underflow
  // nor stall the relative stopping rules.
  const ContourIntegrand G(spec.positive, spec.negative, s, log_scale);
  const double shift = probe_log_abs(piece, G, s) - log_scale;
  if (!std::isfinite(shift)) return evaluate_piece_scaled(piece, spec, s, log_scale, rel_tol);
  if (log_scale + shift < -800.0) return PieceValue{};
  auto pv = evaluate_piece_scaled(piece, spec, s, -shift, rel_tol);
  const double factor = std::exp(log_scale + shift);
  pv.value *= factor;
  pv.abs_err *= factor;
  return pv;
}

ContourSum sum_contour(const ContourPlan& plan, const QuadraticFormSpec& spec, double s,
                       double log_scale, double rel_tol, std::optional<std::size_t> exclude_index) {
  ContourSum sum;
  for (const auto& piece : plan.pieces) {
    const auto pv = evaluate_piece(piece, spec, s, log_scale, rel_tol);
    sum.n_evals += pv.n_evals;
    if (piece.kind == ContourPiece::Kind::Residue && exclude_index == piece.index) {
      sum.excluded += pv.value;
      continue;
    }
    sum.value += pv.value;
    sum.abs_err += pv.abs_err;
  }
  return sum;
}

bool central_simple_applicable(const QuadraticFormSpec& spec) {
  if (spec.positive.empty() || spec.is_difference() || !all_central(spec)) return false;
  for (const auto& t : spec.positive) {
    if (t.n % 2 == 1 && t.n != 1) return false;
  }
  const auto layout = branch_layout(spec);
  for (const auto& cut : layout.finite_cuts) {
    if (!cut.interior_poles.empty()) return false;
  }
  if (layout.unbounded_cut && !layout.unbounded_cut->interior_poles.empty()) return false;
  return true;
}

EvalResult pdf_central_simple(const QuadraticFormSpec& input, double s, double rel_tol) {
  const auto spec = normalize_spec(input);
  require_positive_only(spec);
  if (!central_simple_applicable(spec)) {
    throw Error(Errc::RouteUnavailable, "central-simple route needs central terms with odd dof 1");
  }
  if (s < 0.0) return EvalResult{0.0, 0.0, Route::CentralSimple, 0, ""};
  if (s == 0.0) {
    auto r = pdf_at_zero(spec);
    r.route = Route::CentralSimple;
    return r;
  }
  const auto sc = scaled_by(spec, s);
  const double lk = log_kappa(sc.positive);
  const auto layout = branch_layout(sc);
  const auto& terms = sc.positive;

  EvalResult res;
  res.route = Route::CentralSimple;
  std::string desc;
  auto add = [&](double sign, const RealResult& I, const std::string& what) {
    const double w = std::exp(lk - std::log(kPi));
    res.value += sign * w * I.value;
    res.abs_err += w * I.abs_err;
    res.n_evals += I.n_evals;
    desc += (desc.empty() ? "" : " + ") + what;
  };
  for (const auto& cut : layout.finite_cuts) {
    const auto others = without(terms, {cut.left_index, cut.right_index});
    const auto I = elementary::cut_integral_sin2(cut.left, cut.right, others, 1.0, rel_tol);
    add(cut_sign(sc, cut.left), I, "sin2[" + std::to_string(cut.left) + "," +
                                       std::to_string(cut.right) + "]");
  }
  if (layout.unbounded_cut) {
    const auto& cut = *layout.unbounded_cut;
    const auto others = without(terms, {cut.index});
    const auto I = elementary::unbounded_cut_integral(cut.start, others, 1.0, rel_tol);
    add(cut_sign(sc, cut.start), I, "ray[" + std::to_string(cut.start) + ",inf)");
  }
  for (const auto& pole : layout.isolated_even_poles) {
    res.value += central_residue(sc, pole.index, 1.0, lk);
    res.n_evals += 1;
    desc += (desc.empty() ? "" : " + ") + std::string("residue(") + std::to_string(pole.theta) + ")";
  }
  res.value /= s;
  res.abs_err = res.abs_err / s + 1e-15 * std::abs(res.value);
  res.contour = desc;
  return res;
}

EvalResult pdf_general_contour(const QuadraticFormSpec& input, double s,
                               const ContourOptions& opts) {
  const auto spec = normalize_spec(input);
  require_positive_only(spec);
  if (s < 0.0) return EvalResult{0.0, 0.0, Route::GeneralContour, 0, ""};
  if (s == 0.0) {
    auto r = pdf_at_zero(spec);
    r.route = Route::GeneralContour;
    return r;
  }
  const auto sc = scaled_by(spec, s);
  const auto plan = plan_contour(sc, opts);
  const auto sum = sum_contour(plan, sc, 1.0, log_kappa(sc.positive), opts.rel_tol);
  EvalResult res;
  res.route = plan.residues_only() ? Route::ClosedForm : Route::GeneralContour;
  res.value = sum.value / s;
  res.abs_err = sum.abs_err / s;
  res.n_evals = sum.n_evals;
  res.contour = plan.describe();
  return res;
}

EvalResult pdf(const QuadraticFormSpec& input, double s, const ContourOptions& opts) {
  const auto spec = normalize_spec(input);
  require_positive_only(spec);
  if (all_central(spec) && all_even(spec)) {
    auto r = pdf_general_contour(spec, s, opts);
    r.route = Route::ClosedForm;
    return r;
  }
  if (opts.collapse_central_cuts && central_simple_applicable(spec)) {
    return pdf_central_simple(spec, s, opts.rel_tol);
  }
  return pdf_general_contour(spec, s, opts);
}

QuadraticFormSpec augmented_for_cdf(const QuadraticFormSpec& input, double theta0) {
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
    throw Error(Errc::Theta0OutOfRange, "theta0 must be positive");
  }
  auto spec = normalize_spec(input);
  require_positive_only(spec);
  std::vector<ChiSquareTerm> pos;
  pos.push_back(ChiSquareTerm{theta0, 2, 0.0});
  for (auto t : spec.positive) {
    t.theta += theta0;
    pos.push_back(t);
  }
  return normalize_spec(std::move(pos));
}

namespace {

struct CdfParts {
  double cdf;
  double survivor;
  double abs_err;
  long n_evals;
  Route route;
  std::string contour;
};

CdfParts cdf_parts(const QuadraticFormSpec& input, double x, std::optional<double> theta0,
                   const ContourOptions& opts) {
  const auto spec = normalize_spec(input);
  require_positive_only(spec);
  if (x <= 0.0) return CdfParts{0.0, 1.0, 0.0, 0, Route::ClosedForm, ""};
  const double th0 = theta0.value_or(1.0 / x);
  const auto aug = augmented_for_cdf(spec, th0);
  const auto sc = scaled_by(aug, x);
  // P(X <= x) = kappa e^{x theta0} (1/2 pi i) oint G_aug(u) e^{xu} du; in the scaled
  // variable this picks up x^{N/2} with N the dof of X.
  const double log_scale =
      log_kappa(spec.positive) + x * th0 + 0.5 * spec.total_dof() * std::log(x);
  // theta0 is the smallest theta of the augmented spec.
  const std::size_t pole = 0;
  const auto plan = plan_contour(sc, opts, pole);
  const auto sum = sum_contour(plan, sc, 1.0, log_scale, opts.rel_tol, pole);
  Route route = Route::GeneralContour;
  if (plan.residues_only()) route = Route::ClosedForm;
  else if (opts.collapse_central_cuts && central_simple_applicable(sc)) route = Route::CentralSimple;
  return CdfParts{sum.excluded + sum.value, -sum.value, sum.abs_err, sum.n_evals, route,
                  plan.describe()};
}

}  // namespace

EvalResult cdf(const QuadraticFormSpec& spec, double x, std::optional<double> theta0,
               const ContourOptions& opts) {
  const auto p = cdf_parts(spec, x, theta0, opts);
  return EvalResult{p.cdf, p.abs_err, p.route, p.n_evals, p.contour};
}

EvalResult survivor(const QuadraticFormSpec& spec, double x, std::optional<double> theta0,
                    const ContourOptions& opts) {
  const auto p = cdf_parts(spec, x, theta0, opts);
  return EvalResult{p.survivor, p.abs_err, p.route, p.n_evals, p.contour};
}

double fb_norm_from_pdf(const Eigen::VectorXd& theta, const Eigen::VectorXd& gamma,
                        const Eigen::VectorXi& n, const ContourOptions& opts) {
  if (theta.size() != gamma.size() || theta.size() != n.size() || theta.size() == 0) {
    throw Error(Errc::InvalidArgument, "theta, gamma and n must have the same nonzero size");
  }
  std::vector<ChiSquareTerm> terms;
  double log_norm = std::log(2.0);
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    terms.push_back(make_term(theta[i], n[i], gamma[i] * gamma[i]));
    log_norm += 0.5 * n[i] * std::log(kPi);
  }
  const auto spec = normalize_spec(std::move(terms));
  log_norm -= log_kappa(spec.positive);
  return std::exp(log_norm) * pdf(spec, 1.0, opts).value;
}

namespace elementary {

RealResult cut_integral_sin2(double lo, double hi, std::span<const ChiSquareTerm> others, double s,
                             double rel_tol) {
  if (!(hi > lo)) throw Error(Errc::InvalidArgument, "cut needs lo < hi");
  const double alpha = hi - lo;
  auto f = [&](double u) {
    const double c2 = std::cos(u) * std::cos(u);
    const double s2 = std::sin(u) * std::sin(u);
    const double lg = -s * alpha * s2 + log_abs_others(others, [&](std::size_t i) {
                        return (others[i].theta - lo) * c2 + (others[i].theta - hi) * s2;
                      });
    return std::exp(lg);
  };
  auto r = integrate_finite(f, 0.0, 0.5 * kPi, rel_tol);
  const double w = 2.0 * std::exp(-s * lo);
  return RealResult{w * r.value, w * r.abs_err, r.n_evals};
}

RealResult cut_integral_beta(double lo, double hi, std::span<const ChiSquareTerm> others, double s,
                             double rel_tol) {
  if (!(hi > lo)) throw Error(Errc::InvalidArgument, "cut needs lo < hi");
  const double alpha = hi - lo;
  auto f = [&](double u, double dl, double dr) {
    const double lg = -s * alpha * u + log_abs_others(others, [&](std::size_t i) {
                        return (others[i].theta - lo) - alpha * u;
                      });
    return std::exp(lg) / std::sqrt(dl * dr);
  };
  auto r = integrate_tanh_sinh(f, 0.0, 1.0, rel_tol);
  const double w = std::exp(-s * lo);
  return RealResult{w * r.value, w * r.abs_err, r.n_evals};
}

double degenerate_pair_term(double theta, std::span<const ChiSquareTerm> others, double s) {
  const double lg =
      -s * theta + log_abs_others(others, [&](std::size_t i) { return others[i].theta - theta; });
  return kPi * std::exp(lg);
}

RealResult unbounded_cut_integral(double theta_p, std::span<const ChiSquareTerm> others, double s,
                                  double rel_tol) {
  auto f = [&](double u) {
    const double lg = -s * u * u + log_abs_others(others, [&](std::size_t i) {
                        return (theta_p - others[i].theta) + u * u;
                      });
    return std::exp(lg);
  };
  const double scale = s > 0.0 ? 1.0 / std::sqrt(s) : 1.0;
  auto r = integrate_semi_infinite(f, 0.0, rel_tol, 0.0, scale);
  const double w = 2.0 * std::exp(-s * theta_p);
  return RealResult{w * r.value, w * r.abs_err, r.n_evals};
}

SumWithGradient unit_dof_sum_with_gradient(std::span<const double> thetas, double s,
                                           double rel_tol) {
  const std::size_t N = thetas.size();
  if (N == 0) throw Error(Errc::EmptyPositiveList, "no thetas");
  for (std::size_t i = 0; i < N; ++i) {
    if (!(thetas[i] > 0.0)) throw Error(Errc::NonPositiveTheta, "thetas must be positive");
    if (i > 0 && !(thetas[i] > thetas[i - 1])) {
      throw Error(Errc::InvalidArgument, "thetas must be strictly increasing");
    }
  }
  SumWithGradient out{0.0, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N)), 0.0};
  double sign = 1.0;

  for (std::size_t a = 0; a + 1 < N; a += 2) {
    const std::size_t b = a + 1;
    const double lo = thetas[a];
    const double hi = thetas[b];
    const double alpha = hi - lo;
    // kernel(u) is the integrand of the sin^2 form; weights select the derivative.
    auto t_of = [&](double c2, double s2) { return lo * c2 + hi * s2; };
    auto kernel = [&](double u, auto weight) {
      const double c2 = std::cos(u) * std::cos(u);
      const double s2 = std::sin(u) * std::sin(u);
      double lg = -s * t_of(c2, s2);
      for (std::size_t i = 0; i < N; ++i) {
        if (i == a || i == b) continue;
        lg -= 0.5 * std::log(std::abs((thetas[i] - lo) * c2 + (thetas[i] - hi) * s2));
      }
      return 2.0 * std::exp(lg) * weight(c2, s2);
    };
    auto inv_sum = [&](double c2, double s2) {
      double acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (i == a || i == b) continue;
        acc += 0.5 / ((thetas[i] - lo) * c2 + (thetas[i] - hi) * s2);
      }
      return acc;
    };
    (void)alpha;
    const auto I = integrate_finite(
        [&](double u) { return kernel(u, [](double, double) { return 1.0; }); }, 0.0, 0.5 * kPi,
        rel_tol);
    out.value += sign * I.value / kPi;
    out.abs_err += I.abs_err / kPi;
    for (std::size_t j = 0; j < N; ++j) {
      std::function<double(double)> d;
      if (j == a) {
        d = [&](double u) {
          return kernel(u, [&](double c2, double s2) { return c2 * (-s + inv_sum(c2, s2)); });
        };
      } else if (j == b) {
        d = [&](double u) {
          return kernel(u, [&](double c2, double s2) { return s2 * (-s + inv_sum(c2, s2)); });
        };
      } else {
        d = [&, j](double u) {
          return kernel(u, [&](double c2, double s2) {
            return -0.5 / ((thetas[j] - lo) * c2 + (thetas[j] - hi) * s2);
          });
        };
      }
      const auto D = integrate_finite(d, 0.0, 0.5 * kPi, rel_tol, 1e-3 * rel_tol * std::abs(I.value));
      out.gradient[static_cast<Eigen::Index>(j)] += sign * D.value / kPi;
    }
    sign = -sign;
  }

  if (N % 2 == 1) {
    const std::size_t p = N - 1;
    const double tp = thetas[p];
    auto kernel = [&](double u, auto weight) {
      double lg = -s * (tp + u * u);
      for (std::size_t i = 0; i < p; ++i) lg -= 0.5 * std::log(tp - thetas[i] + u * u);
      return 2.0 * std::exp(lg) * weight(u);
    };
    const double scale = 1.0 / std::sqrt(s);
    const auto I = integrate_semi_infinite(
        [&](double u) { return kernel(u, [](double) { return 1.0; }); }, 0.0, rel_tol, 0.0, scale);
    out.value += sign * I.value / kPi;
    out.abs_err += I.abs_err / kPi;
    for (std::size_t j = 0; j < N; ++j) {
      std::function<double(double)> d;
      if (j == p) {
        d = [&](double u) {
          return kernel(u, [&](double uu) {
            double acc = -s;
            for (std::size_t i = 0; i < p; ++i) acc -= 0.5 / (tp - thetas[i] + uu * uu);
            return acc;
          });
        };
      } else {
        d = [&, j](double u) {
          return kernel(u, [&](double uu) { return 0.5 / (tp - thetas[j] + uu * uu); });
        };
      }
      const auto D = integrate_semi_infinite(d, 0.0, rel_tol, 1e-3 * rel_tol * std::abs(I.value),
                                             scale);
      out.gradient[static_cast<Eigen::Index>(j)] += sign * D.value / kPi;
    }
  }
  return out;
}

}  // namespace elementary

LiftedEvaluator::LiftedEvaluator(QuadraticFormSpec base, std::size_t index, double rel_tol)
    : base_(normalize_spec(base)), index_(index), rel_tol_(rel_tol), analytic_(false) {
  require_positive_only(base_);
  if (index_ >= base_.positive.size()) throw Error(Errc::InvalidArgument, "term index out of range");
  lifted_ = base_;
  lifted_.positive[index_].n += 2;
  analytic_ = all_central(base_) &&
              std::all_of(base_.positive.begin(), base_.positive.end(),
                          [](const ChiSquareTerm& t) { return t.n == 1; });
}

EvalResult LiftedEvaluator::operator()(double s) const {
  if (!analytic_) return pdf(lifted_, s, ContourOptions{rel_tol_, true});
  if (s <= 0.0) return pdf(lifted_, s, ContourOptions{rel_tol_, true});
  // f_lift = kappa_lift * (-2/n_j) d(f/kappa)/d theta_j on the scaled spec at s = 1.
  const auto sc = scaled_by(base_, s);
  std::vector<double> th;
  for (const auto& t : sc.positive) th.push_back(t.theta);
  const auto sg = elementary::unit_dof_sum_with_gradient(th, 1.0, rel_tol_);
  const double lk_lift = log_kappa(sc.positive) + std::log(th[index_]);
  const double w = std::exp(lk_lift) * (-2.0 / base_.positive[index_].n);
  EvalResult r;
  r.route = Route::CentralSimple;
  r.value = w * sg.gradient[static_cast<Eigen::Index>(index_)] / s;
  r.abs_err = std::abs(w) * sg.abs_err / s + 1e-12 * std::abs(r.value);
  r.contour = "lift(" + std::to_string(index_) + ")";
  return r;
}

LiftedEvaluator multiplicity_lift(const QuadraticFormSpec& spec, std::size_t term_index,
                                  double rel_tol) {
  return LiftedEvaluator(spec, term_index, rel_tol);
}

}  // namespace gchisq
