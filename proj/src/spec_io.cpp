#include "gchisq/spec_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

using nlohmann::json;

double number(const json& term, const char* key) {
  const auto& v = term.at(key);
  if (!v.is_number()) throw Error(Errc::ParseError, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

ChiSquareTerm parse_term(const json& term) {
  if (!term.is_object()) throw Error(Errc::ParseError, "each term must be an object");
  const bool has_theta = term.contains("theta");
  const bool has_lambda = term.contains("lambda");
  if (has_theta == has_lambda) {
    throw Error(Errc::ParseError, "a term needs exactly one of 'theta' and 'lambda'");
  }
  if (term.contains("gamma2") && term.contains("delta")) {
    throw Error(Errc::ParseError, "'gamma2' and 'delta' are mutually exclusive");
  }
  if (!term.contains("n")) throw Error(Errc::ParseError, "a term needs 'n'");
  const double n = number(term, "n");
  if (has_theta) {
    const double g2 = term.contains("gamma2") ? number(term, "gamma2") : 0.0;
    if (term.contains("delta")) {
      const double theta = number(term, "theta");
      return make_term(theta, n, 2.0 * theta * number(term, "delta"));
    }
    return make_term(number(term, "theta"), n, g2);
  }
  const double lambda = number(term, "lambda");
  if (term.contains("gamma2")) {
    return make_term(0.5 / lambda, n, number(term, "gamma2"));
  }
  return term_from_coefficient(lambda, n, term.contains("delta") ? number(term, "delta") : 0.0);
}

std::vector<ChiSquareTerm> parse_list(const json& doc, const char* key) {
  std::vector<ChiSquareTerm> out;
  if (!doc.contains(key)) return out;
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw Error(Errc::ParseError, std::string("'") + key + "' must be an array");
  for (const auto& t : arr) out.push_back(parse_term(t));
  return out;
}

}  // namespace

QuadraticFormSpec parse_spec_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "spec must be a JSON object");
  try {
    return normalize_spec(parse_list(doc, "positive"), parse_list(doc, "negative"));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

QuadraticFormSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_json(ss.str());
}

std::string spec_to_json(const QuadraticFormSpec& spec) {
  auto list = [](const std::vector<ChiSquareTerm>& terms) {
    json arr = json::array();
    for (const auto& t : terms) arr.push_back({{"theta", t.theta}, {"n", t.n}, {"gamma2", t.gamma2}});
    return arr;
  };
  json doc{{"positive", list(spec.positive)}, {"negative", list(spec.negative)}};
  return doc.dump();
}

}  // namespace gchisq
