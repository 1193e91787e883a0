#pragma once

#include <string>

#include "gchisq/qform.hpp"

namespace gchisq {

// {"positive":[{"theta":..,"n":..,"gamma2":..}], "negative":[...]}; a term may use
// "lambda" instead of "theta" and "delta" instead of "gamma2". Unknown top-level
// keys such as "note" are ignored.
QuadraticFormSpec parse_spec_json(const std::string& text);
QuadraticFormSpec load_spec(const std::string& path);
std::string spec_to_json(const QuadraticFormSpec& spec);

}  // namespace gchisq
