#pragma once

#include <Eigen/Dense>
#include <optional>

#include "gchisq/inversion.hpp"
#include "gchisq/qform.hpp"

namespace gchisq {

// Density of Z = X - Y. For z < 0 the roles of X and Y are exchanged.
EvalResult pdf_diff(const QuadraticFormSpec& spec, double z, const ContourOptions& opts = {});

// P(Z <= z) from the augmented combination with theta0 in (0, min theta'); the default
// theta0 is half the smallest theta of the list on the negative side.
EvalResult cdf_diff(const QuadraticFormSpec& spec, double z, std::optional<double> theta0 = {},
                    const ContourOptions& opts = {});
EvalResult survivor_diff(const QuadraticFormSpec& spec, double z,
                         std::optional<double> theta0 = {}, const ContourOptions& opts = {});

// Sum of exponentials with distinct rates `pos` minus a sum with rates `neg`
// (each term a (1/(2 theta)) chi^2_2), in closed form.
double hypoexp_diff_pdf(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg, double z);
double hypoexp_diff_survivor(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg, double z);

}  // namespace gchisq
