#include "gchisq/qform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gchisq/error.hpp"

namespace gchisq {

ChiSquareTerm make_term(double theta, double n, double gamma2) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(Errc::NonPositiveTheta, "theta must be positive and finite");
  }
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e6) {
    throw Error(Errc::NonIntegerDof, "degrees of freedom must be a positive integer");
  }
  if (!(gamma2 >= 0.0) || !std::isfinite(gamma2)) {
    throw Error(Errc::InvalidArgument, "gamma2 must be non-negative");
  }
  return ChiSquareTerm{theta, static_cast<int>(n), gamma2};
}

ChiSquareTerm term_from_coefficient(double lambda, double n, double delta) {
  if (!(lambda > 0.0)) throw Error(Errc::NonPositiveTheta, "coefficient must be positive");
  const double theta = 0.5 / lambda;
  return make_term(theta, n, 2.0 * theta * delta);
}

int QuadraticFormSpec::total_dof() const {
  int total = 0;
  for (const auto& t : positive) total += t.n;
  for (const auto& t : negative) total += t.n;
  return total;
}

double QuadraticFormSpec::min_theta() const {
  double m = positive.empty() ? 0.0 : positive.front().theta;
  for (const auto& t : positive) m = std::min(m, t.theta);
  return m;
}

double QuadraticFormSpec::mean() const {
  double m = 0.0;
  for (const auto& t : positive) m += t.lambda() * (t.n + t.delta());
  for (const auto& t : negative) m -= t.lambda() * (t.n + t.delta());
  return m;
}

double QuadraticFormSpec::variance() const {
  double v = 0.0;
  auto add = [&v](const ChiSquareTerm& t) {
    v += 2.0 * t.lambda() * t.lambda() * (t.n + 2.0 * t.delta());
  };
  std::for_each(positive.begin(), positive.end(), add);
  std::for_each(negative.begin(), negative.end(), add);
  return v;
}

bool operator==(const ChiSquareTerm& a, const ChiSquareTerm& b) {
  return a.theta == b.theta && a.n == b.n && a.gamma2 == b.gamma2;
}

bool operator==(const QuadraticFormSpec& a, const QuadraticFormSpec& b) {
  return a.positive == b.positive && a.negative == b.negative;
}

namespace {

std::vector<ChiSquareTerm> merge_sorted(std::vector<ChiSquareTerm> terms) {
  for (const auto& t : terms) make_term(t.theta, t.n, t.gamma2);
  std::sort(terms.begin(), terms.end(),
            [](const ChiSquareTerm& a, const ChiSquareTerm& b) { return a.theta < b.theta; });
  std::vector<ChiSquareTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty()) {
      auto& last = merged.back();
      if (std::abs(t.theta - last.theta) < kThetaMergeTol * std::max(t.theta, last.theta)) {
        last.n += t.n;
        last.gamma2 += t.gamma2;
        continue;
      }
    }
    merged.push_back(t);
  }
  return merged;
}

}  // namespace

QuadraticFormSpec normalize_spec(std::vector<ChiSquareTerm> positive,
                                 std::vector<ChiSquareTerm> negative) {
  if (positive.empty()) throw Error(Errc::EmptyPositiveList, "positive list is empty");
  return QuadraticFormSpec{merge_sorted(std::move(positive)), merge_sorted(std::move(negative))};
}

QuadraticFormSpec normalize_spec(const QuadraticFormSpec& spec) {
  return normalize_spec(spec.positive, spec.negative);
}

QuadraticFormSpec swapped(const QuadraticFormSpec& spec) {
  return QuadraticFormSpec{spec.negative, spec.positive};
}

BranchCutLayout branch_layout(const QuadraticFormSpec& spec) {
  const auto& terms = spec.positive;
  BranchCutLayout layout;

  std::vector<std::size_t> odd;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].n % 2 == 1) odd.push_back(i);
  }
  // Ascending pairing; a leftover odd term pairs with -infinity.
  for (std::size_t k = 0; k + 1 < odd.size(); k += 2) {
    const auto& lo = terms[odd[k]];
    const auto& hi = terms[odd[k + 1]];
    FiniteCut cut{lo.theta, hi.theta, odd[k], odd[k + 1], {}, {!lo.central(), !hi.central()}};
    layout.finite_cuts.push_back(std::move(cut));
  }
  if (odd.size() % 2 == 1) {
    const auto& last = terms[odd.back()];
    layout.unbounded_cut = UnboundedCut{last.theta, odd.back(), !last.central(), {}};
  }

  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.n % 2 != 0) continue;
    CutPole pole{t.theta, t.n / 2, !t.central(), i};
    bool placed = false;
    for (auto& cut : layout.finite_cuts) {
      if (t.theta > cut.left && t.theta < cut.right) {
        cut.interior_poles.push_back(pole);
        placed = true;
        break;
      }
    }
    if (!placed && layout.unbounded_cut && t.theta > layout.unbounded_cut->start) {
      layout.unbounded_cut->interior_poles.push_back(pole);
      placed = true;
    }
    if (!placed) layout.isolated_even_poles.push_back(pole);
  }
  return layout;
}

RescaledSpec rescale_shift(const QuadraticFormSpec& spec, double s, double c) {
  if (spec.is_difference()) {
    throw Error(Errc::NotAPositiveCombination, "rescale_shift needs an empty negative list");
  }
  if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  if (!(c < spec.min_theta())) throw Error(Errc::ShiftTooLarge, "shift must be below min theta");

  double log_pref = -s * c - std::log(s);
  QuadraticFormSpec out;
  out.positive.reserve(spec.positive.size());
  for (const auto& t : spec.positive) {
    const double shifted = t.theta - c;
    log_pref += 0.5 * t.n * (std::log(t.theta) - std::log(shifted));
    log_pref += t.gamma2 / (4.0 * shifted) - t.gamma2 / (4.0 * t.theta);
    out.positive.push_back(ChiSquareTerm{s * shifted, t.n, s * t.gamma2});
  }
  return RescaledSpec{std::move(out), std::exp(log_pref)};
}

}  // namespace gchisq
