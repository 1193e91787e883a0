#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gchisq/integrand.hpp"
#include "gchisq/qform.hpp"
#include "gchisq/quadrature.hpp"

namespace gchisq {

enum class Route { CentralSimple, GeneralContour, ClosedForm };

const char* to_string(Route route) noexcept;

struct EvalResult {
  double value = 0.0;
  double abs_err = 0.0;
  Route route = Route::ClosedForm;
  long n_evals = 0;
  std::string contour;
};

// One closed contour (or its collapsed limit) enclosing part of the singular set of
// G(t) = g(t) g'(-t) e^{st}. Every piece evaluates (1/(2 pi i)) of the anticlockwise
// integral around what it encloses.
struct ContourPiece {
  enum class Kind {
    RealSegment,   // both sides of a finite cut with half-order central endpoints
    Circle,        // periodic trapezoid around a cut or a non-central isolated pole
    KeyholeRays,   // lines Im t = +-nu joined at Re t = right, around the unbounded cut
    Box,           // rectangle [left, right] x [-nu, nu] around a wide finite group
    SemiInfinite,  // both sides of an unbounded cut with a half-order central endpoint
    Residue,       // analytic residue of a central even-order pole
  };
  Kind kind;
  double lo = 0.0;  // theta endpoints of a real segment; theta of a semi-infinite cut or pole
  double hi = 0.0;
  double center = 0.0;
  double radius = 0.0;
  double nu = 0.0;
  double left = 0.0;
  double right = 0.0;
  std::size_t index = 0;  // term index in the positive list

  std::string describe() const;
};

struct ContourPlan {
  std::vector<ContourPiece> pieces;

  bool residues_only() const;
  std::string describe() const;
};

struct ContourOptions {
  double rel_tol = kDefaultRelTol;
  // Central cuts with half-order endpoints collapse onto the real axis; when false
  // they are enclosed by circles / keyhole rays instead.
  bool collapse_central_cuts = true;
};

// Plan for the singularities of g over the positive list; the negative list only
// contributes the poles of g'(-t) at +theta' that circles must avoid. Components too close to
// a non-central singularity share one contour; the pole of `protected_index` always keeps
// its own residue piece.
ContourPlan plan_contour(const QuadraticFormSpec& spec, const ContourOptions& opts = {},
                         std::optional<std::size_t> protected_index = {});

struct PieceValue {
  double value = 0.0;
  double abs_err = 0.0;
  long n_evals = 0;
};

// (1/(2 pi i)) times the anticlockwise integral of exp(log_scale) G(t) around the piece.
PieceValue evaluate_piece(const ContourPiece& piece, const QuadraticFormSpec& spec, double s,
                          double log_scale, double rel_tol);

struct ContourSum {
  double value = 0.0;
  double abs_err = 0.0;
  long n_evals = 0;
  double excluded = 0.0;  // value of the residue left out of `value`, if any
};

// Sum of all pieces of the plan; a Residue piece at `exclude_index` is reported
// separately in `excluded`.
ContourSum sum_contour(const ContourPlan& plan, const QuadraticFormSpec& spec, double s,
                       double log_scale, double rel_tol,
                       std::optional<std::size_t> exclude_index = {});

// Residue of exp(log_scale) G(t) at t = -theta_index for a central term of even dof.
double central_residue(const QuadraticFormSpec& spec, std::size_t index, double s,
                       double log_scale);

// Density of a positive combination; dispatches closed-form > central-simple > general.
EvalResult pdf(const QuadraticFormSpec& spec, double s, const ContourOptions& opts = {});
EvalResult pdf_central_simple(const QuadraticFormSpec& spec, double s,
                              double rel_tol = kDefaultRelTol);
EvalResult pdf_general_contour(const QuadraticFormSpec& spec, double s,
                               const ContourOptions& opts = {});
bool central_simple_applicable(const QuadraticFormSpec& spec);

// P(X <= x) through the density of the augmented combination with an extra
// (1/(2 theta0)) chi^2_2 term. Without theta0 the value 1/x is used.
EvalResult cdf(const QuadraticFormSpec& spec, double x, std::optional<double> theta0 = {},
               const ContourOptions& opts = {});
EvalResult survivor(const QuadraticFormSpec& spec, double x, std::optional<double> theta0 = {},
                    const ContourOptions& opts = {});

// The spec of the augmented variable used by cdf().
QuadraticFormSpec augmented_for_cdf(const QuadraticFormSpec& spec, double theta0);

// Fisher-Bingham normalizing constant from the density at 1:
//   C = 2 pi^{sum n/2} exp(sum gamma^2/(4 theta)) / prod theta^{n/2} * pdf(1).
// gamma holds the linear coefficients; thetas must be positive.
double fb_norm_from_pdf(const Eigen::VectorXd& theta, const Eigen::VectorXd& gamma,
                        const Eigen::VectorXi& n, const ContourOptions& opts = {});

// Evaluator for the spec with n_j increased by 2.
class LiftedEvaluator {
 public:
  LiftedEvaluator(QuadraticFormSpec base, std::size_t index, double rel_tol);

  EvalResult operator()(double s) const;
  // True when the lift is computed by differentiating the elementary integrals.
  bool analytic() const { return analytic_; }
  const QuadraticFormSpec& lifted_spec() const { return lifted_; }

 private:
  QuadraticFormSpec base_;
  QuadraticFormSpec lifted_;
  std::size_t index_;
  double rel_tol_;
  bool analytic_;
};

LiftedEvaluator multiplicity_lift(const QuadraticFormSpec& spec, std::size_t term_index,
                                  double rel_tol = kDefaultRelTol);

namespace elementary {

// Integral over [theta_lo, theta_hi] of e^{-st} / sqrt((t - lo)(hi - t)) * prod_i |theta_i - t|^{-n_i/2}
// over `others`, in the sin^2 parametrization.
RealResult cut_integral_sin2(double lo, double hi, std::span<const ChiSquareTerm> others, double s,
                             double rel_tol = kDefaultRelTol);
// Same integral in the beta-type parametrization t = lo + (hi - lo) u.
RealResult cut_integral_beta(double lo, double hi, std::span<const ChiSquareTerm> others, double s,
                             double rel_tol = kDefaultRelTol);
// Limit of the cut integral as hi -> lo: pi e^{-s lo} prod |theta_i - lo|^{-n_i/2}.
double degenerate_pair_term(double theta, std::span<const ChiSquareTerm> others, double s);
// Integral over [theta_p, inf) of e^{-st} / sqrt(t - theta_p) * prod |theta_i - t|^{-n_i/2},
// computed as 2 e^{-s theta_p} int_0^inf e^{-s u^2} prod (...)^{-n_i/2} du.
RealResult unbounded_cut_integral(double theta_p, std::span<const ChiSquareTerm> others, double s,
                                  double rel_tol = kDefaultRelTol);

// For distinct central thetas of dof 1: the density divided by kappa and its gradient
// with respect to each theta, from the elementary integrals and their analytic derivatives.
struct SumWithGradient {
  double value;
  Eigen::VectorXd gradient;
  double abs_err;
};
SumWithGradient unit_dof_sum_with_gradient(std::span<const double> thetas, double s,
                                           double rel_tol = kDefaultRelTol);

}  // namespace elementary

}  // namespace gchisq
