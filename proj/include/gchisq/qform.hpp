#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace gchisq {

// One scaled non-central chi-square component (1/(2 theta)) chi^2_n(gamma2 / (2 theta)).
// theta is the inverse scale, gamma2 the squared mean-norm parameter.
struct ChiSquareTerm {
  double theta = 1.0;
  int n = 1;
  double gamma2 = 0.0;

  bool central() const { return gamma2 == 0.0; }
  double lambda() const { return 0.5 / theta; }
  double delta() const { return gamma2 / (2.0 * theta); }
};

// Validating constructor; n is taken as a real so that non-integer input can be rejected.
ChiSquareTerm make_term(double theta, double n, double gamma2 = 0.0);

// Term from the coefficient form lambda * chi^2_n(delta).
ChiSquareTerm term_from_coefficient(double lambda, double n, double delta = 0.0);

// X - Y with X built from `positive` and Y from `negative`.
struct QuadraticFormSpec {
  std::vector<ChiSquareTerm> positive;
  std::vector<ChiSquareTerm> negative;

  bool is_difference() const { return !negative.empty(); }
  int total_dof() const;
  double min_theta() const;
  double mean() const;
  double variance() const;
};

bool operator==(const ChiSquareTerm& a, const ChiSquareTerm& b);
bool operator==(const QuadraticFormSpec& a, const QuadraticFormSpec& b);

// Relative tolerance under which two thetas are considered the same scale.
inline constexpr double kThetaMergeTol = 1e-12;

// Validates, merges equal scales (dof and gamma2 add) and sorts each list by theta.
QuadraticFormSpec normalize_spec(std::vector<ChiSquareTerm> positive,
                                 std::vector<ChiSquareTerm> negative = {});
QuadraticFormSpec normalize_spec(const QuadraticFormSpec& spec);

// Y - X.
QuadraticFormSpec swapped(const QuadraticFormSpec& spec);

struct CutPole {
  double theta;
  int order;  // n / 2 for an even multiplicity n
  bool noncentral;
  std::size_t index;  // position in spec.positive
};

struct FiniteCut {
  double left;   // smaller theta; the cut on the t axis is [-right, -left]
  double right;
  std::size_t left_index;
  std::size_t right_index;
  std::vector<CutPole> interior_poles;
  std::pair<bool, bool> endpoints_noncentral{false, false};
};

struct UnboundedCut {
  double start;  // t runs over (-inf, -start]
  std::size_t index;
  bool noncentral_endpoint = false;
  std::vector<CutPole> interior_poles;
};

struct BranchCutLayout {
  std::vector<FiniteCut> finite_cuts;
  std::optional<UnboundedCut> unbounded_cut;
  std::vector<CutPole> isolated_even_poles;

  std::size_t cut_count() const { return finite_cuts.size() + (unbounded_cut ? 1 : 0); }
};

// Layout of the singularities of g(t) for the positive list of a normalized spec.
BranchCutLayout branch_layout(const QuadraticFormSpec& spec);

struct RescaledSpec {
  QuadraticFormSpec spec;
  double prefactor;
};

// pdf(spec, s) == prefactor * pdf(result.spec, 1), with theta -> s*theta - s*c and
// gamma2 -> s*gamma2.
RescaledSpec rescale_shift(const QuadraticFormSpec& spec, double s, double c);

}  // namespace gchisq
