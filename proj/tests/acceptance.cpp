// One PASS/FAIL line per acceptance criterion; failing cases are listed underneath.
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "checks.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<gchisq::checks::SuiteReport()> run;
};

}  // namespace

int main() {
  using namespace gchisq::checks;
  constexpr std::uint64_t kSeed = 42;
  const std::vector<Criterion> criteria{
      {1, "published difference survivor values", [] { return table1(); }},
      {2, "closed-form gamma and hypoexponential agreement", [] { return closed_forms(); }},
      {3, "route equivalence", [] { return route_equivalence(kSeed); }},
      {4, "identities (theta0, rescale/shift, lift, limits)", [] { return identities(kSeed); }},
      {5, "independent oracles (Imhof, convolution, Monte Carlo)", [] { return oracles(kSeed); }},
      {6, "normalization", [] { return normalization(kSeed); }},
      {7, "directional constants", [] { return directional(); }},
      {8, "saddlepoint comparison", [] { return saddlepoint(); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    bool ok = false;
    std::string summary;
    std::vector<std::string> failed;
    try {
      const auto rep = c.run();
      ok = rep.pass();
      summary = std::to_string(rep.passed()) + "/" + std::to_string(rep.cases.size()) + " cases";
      for (const auto& r : rep.cases) {
        if (!r.pass) failed.push_back(r.name + " err=" + std::to_string(r.error) + " tol=" + std::to_string(r.tol));
      }
    } catch (const std::exception& e) {
      summary = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << summary << ")\n";
    for (const auto& f : failed) std::cout << "    " << f << "\n";
    failures += !ok;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
