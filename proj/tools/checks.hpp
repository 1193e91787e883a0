#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gchisq/qform.hpp"

namespace gchisq::checks {

struct CaseResult {
  std::string name;
  double error = 0.0;  // achieved error in the unit named by the suite (absolute or relative)
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CaseResult> cases;

  bool pass() const;
  std::size_t passed() const;
  void add(std::string case_name, double error, double tol, std::string detail = {});
  void print(std::ostream& os) const;
};

// Specs of the three difference cases with reference survivor values.
struct TableCase {
  std::string label;
  QuadraticFormSpec spec;
  std::vector<std::pair<double, double>> survivor_at;  // (s, reference survivor)
};
std::vector<TableCase> table1_cases();

// The spec with thetas (5/6, 5/3, 5), n = 1 each, and its doubled-multiplicity variant.
QuadraticFormSpec theta1_spec();
QuadraticFormSpec theta2_spec();

// Random specs drawn from a fixed seed.
QuadraticFormSpec random_positive_spec(std::uint64_t seed, bool central, int max_terms = 6);
QuadraticFormSpec random_difference_spec(std::uint64_t seed, int max_terms = 4);

// x with P(X <= x) = p, by bisection on the library cdf.
double quantile(const QuadraticFormSpec& spec, double p);

// One report per acceptance criterion.
SuiteReport table1();
SuiteReport closed_forms();
SuiteReport route_equivalence(std::uint64_t seed);
SuiteReport identities(std::uint64_t seed);
SuiteReport oracles(std::uint64_t seed, std::int64_t mc_samples = 10'000'000);
SuiteReport normalization(std::uint64_t seed);
SuiteReport directional();
SuiteReport saddlepoint();

}  // namespace gchisq::checks
