// Command-line front end: densities, distribution functions, directional constants,
// oracle cross-checks and saddlepoint comparisons.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "checks.hpp"
#include "gchisq/difference.hpp"
#include "gchisq/directional.hpp"
#include "gchisq/error.hpp"
#include "gchisq/inversion.hpp"
#include "gchisq/spa.hpp"
#include "gchisq/spec_io.hpp"

namespace {

using namespace gchisq;

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNoConvergence = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "'");
    }
    if (used != item.size()) throw UsageError("bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// "A:B:N" with N >= 1 points, strictly increasing when N > 1.
std::vector<double> parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw UsageError("grid must be A:B:N");
  }
  const auto a = parse_list(text.substr(0, first));
  const auto b = parse_list(text.substr(first + 1, second - first - 1));
  const auto n = parse_list(text.substr(second + 1));
  if (a.size() != 1 || b.size() != 1 || n.size() != 1) throw UsageError("grid must be A:B:N");
  if (!(n[0] >= 1.0) || n[0] != std::floor(n[0])) throw UsageError("empty grid");
  const auto count = static_cast<std::size_t>(n[0]);
  if (count > 1 && !(b[0] > a[0])) throw UsageError("grid end must exceed its start");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = count == 1 ? a[0] : a[0] + (b[0] - a[0]) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

// Evaluates f at every point on all hardware threads; results stay in grid order.
template <typename Row>
std::vector<Row> evaluate_grid(const std::vector<double>& grid, const std::function<Row(double)>& f) {
  std::vector<Row> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = f(grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

struct EvalOptions {
  std::string kind;
  std::string spec_path;
  std::optional<double> at;
  std::string grid;
  std::optional<double> theta0;
  std::string out = "csv";
  double tol = kDefaultRelTol;
};

int run_eval(const EvalOptions& o) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  const auto spec = load_spec(o.spec_path);
  std::vector<double> grid;
  if (o.at && !o.grid.empty()) throw UsageError("use either --at or --grid");
  if (o.at) {
    grid = {*o.at};
  } else if (!o.grid.empty()) {
    grid = parse_grid(o.grid);
  } else {
    throw UsageError("one of --at or --grid is required");
  }
  const ContourOptions opts{o.tol, true};
  const std::function<EvalResult(double)> f = [&](double s) -> EvalResult {
    if (o.kind == "pdf") return spec.is_difference() ? pdf_diff(spec, s, opts) : pdf(spec, s, opts);
    if (o.kind == "cdf") return spec.is_difference() ? cdf_diff(spec, s, o.theta0, opts) : cdf(spec, s, o.theta0, opts);
    return spec.is_difference() ? survivor_diff(spec, s, o.theta0, opts) : survivor(spec, s, o.theta0, opts);
  };
  const auto rows = evaluate_grid(grid, f);
  if (o.out == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      arr.push_back({{"s", grid[i]}, {"value", rows[i].value}, {"abs_err", rows[i].abs_err}});
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    std::cout << "s,value,abs_err\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::cout << num(grid[i]) << "," << num(rows[i].value) << "," << num(rows[i].abs_err) << "\n";
    }
  }
  return kOk;
}

struct SpaRow {
  double exact_pdf, spa_pdf, exact_cdf, spa_cdf, spa_cdf_via_pdf;
};

double rel(double approx, double exact) {
  if (std::isnan(approx) || exact == 0.0) return NAN;
  return std::abs(approx - exact) / std::abs(exact);
}

int run_spa_compare(const std::string& spec_path, const std::string& grid_text) {
  const auto spec = load_spec(spec_path);
  const auto grid = parse_grid(grid_text);
  const CgfContext ctx(spec);
  const std::function<SpaRow(double)> f = [&](double s) {
    SpaRow r{};
    r.exact_pdf = spec.is_difference() ? pdf_diff(spec, s).value : pdf(spec, s).value;
    r.exact_cdf = spec.is_difference() ? cdf_diff(spec, s).value : cdf(spec, s).value;
    // Outside the range of K' (e.g. s <= 0 for a positive combination) the SPA is undefined.
    auto guarded = [&](auto&& g) {
      try {
        return g();
      } catch (const Error& e) {
        if (e.code() == Errc::SaddleOutOfRange || e.code() == Errc::Theta0OutOfRange) return double(NAN);
        throw;
      }
    };
    r.spa_pdf = guarded([&] { return spa_pdf(ctx, s); });
    r.spa_cdf = guarded([&] { return spa_cdf(ctx, s); });
    r.spa_cdf_via_pdf = guarded([&] { return spa_cdf_via_pdf(ctx, s); });
    return r;
  };
  const auto rows = evaluate_grid(grid, f);
  std::cout << "s,exact_pdf,spa_pdf,exact_cdf,spa_cdf,spa_cdf_via_pdf,rel_err_pdf,rel_err_cdf,rel_err_cdf_via_pdf\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = rows[i];
    std::cout << num(grid[i]) << "," << num(r.exact_pdf) << "," << num(r.spa_pdf) << "," << num(r.exact_cdf) << ","
              << num(r.spa_cdf) << "," << num(r.spa_cdf_via_pdf) << "," << num(rel(r.spa_pdf, r.exact_pdf)) << ","
              << num(rel(r.spa_cdf, r.exact_cdf)) << "," << num(rel(r.spa_cdf_via_pdf, r.exact_cdf)) << "\n";
  }
  return kOk;
}

int run_check(const std::string& suite, std::uint64_t seed, std::int64_t mc_samples) {
  using namespace gchisq::checks;
  std::vector<std::function<SuiteReport()>> suites;
  const bool all = suite == "all";
  if (all || suite == "table1") suites.push_back([] { return table1(); });
  if (all || suite == "closed-forms") suites.push_back([] { return closed_forms(); });
  if (all || suite == "route-equivalence") suites.push_back([=] { return route_equivalence(seed); });
  if (all || suite == "identities") suites.push_back([=] { return identities(seed); });
  if (all || suite == "oracles") suites.push_back([=] { return oracles(seed, mc_samples); });
  if (all || suite == "normalization") suites.push_back([=] { return normalization(seed); });
  if (all || suite == "directional") suites.push_back([] { return directional(); });
  if (all || suite == "saddlepoint") suites.push_back([] { return saddlepoint(); });
  if (suites.empty()) throw UsageError("unknown suite '" + suite + "'");
  bool ok = true;
  for (const auto& run : suites) {
    const auto rep = run();
    rep.print(std::cout);
    ok = ok && rep.pass();
  }
  return ok ? kOk : kCheckFailed;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities and distribution functions of quadratic forms in normal variables"};
  app.require_subcommand(1);

  std::vector<EvalOptions> eval_opts(3);
  const char* kinds[] = {"pdf", "cdf", "survivor"};
  std::vector<CLI::App*> eval_cmds;
  for (int k = 0; k < 3; ++k) {
    auto& o = eval_opts[static_cast<std::size_t>(k)];
    o.kind = kinds[k];
    auto* cmd = app.add_subcommand(kinds[k], std::string("Evaluate the ") + kinds[k]);
    cmd->add_option("--spec", o.spec_path, "Spec JSON file")->required();
    cmd->add_option("--at", o.at, "Single evaluation point");
    cmd->add_option("--grid", o.grid, "Grid A:B:N");
    cmd->add_option("--theta0", o.theta0, "Auxiliary exponential parameter for cdf/survivor");
    cmd->add_option("--out", o.out, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", o.tol, "Relative tolerance");
    eval_cmds.push_back(cmd);
  }

  std::string theta_text, n_text, phi_text;
  bool grad = false;
  auto* bingham = app.add_subcommand("bingham", "Bingham normalizing constant");
  bingham->add_option("--theta", theta_text, "Comma-separated thetas")->required();
  bingham->add_option("--n", n_text, "Comma-separated multiplicities (default all 1)");
  auto* so3 = app.add_subcommand("fisher-so3", "Fisher distribution on SO(3)");
  so3->add_option("--phi", phi_text, "phi1,phi2,phi3")->required();
  so3->add_flag("--grad", grad, "Also print the gradient of the log constant");
  auto* cbingham = app.add_subcommand("cbingham", "Complex Bingham normalizing constant");
  cbingham->add_option("--theta", theta_text, "Comma-separated distinct thetas")->required();
  double beta = 0.0, kappa = 0.0, radius = 0.75;
  auto* kent = app.add_subcommand("kent", "Kent normalizing constant on S^2");
  kent->add_option("--beta", beta)->required();
  kent->add_option("--kappa", kappa)->required();
  kent->add_option("--radius", radius, "Circle radius as a fraction of beta, in (0.5, 1)");

  std::string suite = "all";
  std::uint64_t seed = 42;
  std::int64_t mc_samples = 10'000'000;
  auto* check = app.add_subcommand("check", "Run the oracle cross-check suites");
  check->add_option("--suite", suite, "table1|closed-forms|oracles|all (or one acceptance suite name)");
  check->add_option("--seed", seed, "Seed for randomized cases");
  check->add_option("--mc-samples", mc_samples, "Monte Carlo sample size (0 skips it)");

  std::string spa_spec, spa_grid, spa_out = "csv";
  auto* spa = app.add_subcommand("spa-compare", "Exact versus saddlepoint curves");
  spa->add_option("--spec", spa_spec)->required();
  spa->add_option("--grid", spa_grid)->required();
  spa->add_option("--out", spa_out)->check(CLI::IsMember({"csv"}));

  std::string q_spec;
  double q_p = 0.5;
  auto* quant = app.add_subcommand("quantile", "Inverse cdf by bisection");
  quant->add_option("--spec", q_spec)->required();
  quant->add_option("--p", q_p)->required()->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    for (std::size_t k = 0; k < eval_cmds.size(); ++k) {
      if (eval_cmds[k]->parsed()) return run_eval(eval_opts[k]);
    }
    if (bingham->parsed()) {
      const auto th = parse_list(theta_text);
      Eigen::VectorXi n = Eigen::VectorXi::Ones(static_cast<Eigen::Index>(th.size()));
      if (!n_text.empty()) {
        const auto nv = parse_list(n_text);
        if (nv.size() != th.size()) throw UsageError("--theta and --n differ in length");
        for (std::size_t i = 0; i < nv.size(); ++i) {
          if (nv[i] != std::floor(nv[i])) throw UsageError("multiplicities must be integers");
          n[static_cast<Eigen::Index>(i)] = static_cast<int>(nv[i]);
        }
      }
      std::cout << num(bingham_const(BinghamParams{to_eigen(th), n})) << "\n";
      return kOk;
    }
    if (so3->parsed()) {
      const auto p = parse_list(phi_text);
      if (p.size() != 3) throw UsageError("--phi needs three values");
      const Eigen::Vector3d phi(p[0], p[1], p[2]);
      std::cout << num(fisher_so3_const(phi)) << "\n";
      if (grad) {
        const auto g = fisher_so3_grad(phi);
        std::cout << num(g[0]) << "," << num(g[1]) << "," << num(g[2]) << "\n";
      }
      return kOk;
    }
    if (cbingham->parsed()) {
      std::cout << num(complex_bingham_const(to_eigen(parse_list(theta_text)))) << "\n";
      return kOk;
    }
    if (kent->parsed()) {
      std::cout << num(kent_const(KentParams{beta, kappa}, radius)) << "\n";
      return kOk;
    }
    if (check->parsed()) return run_check(suite, seed, mc_samples);
    if (spa->parsed()) return run_spa_compare(spa_spec, spa_grid);
    if (quant->parsed()) {
      std::cout << num(checks::quantile(load_spec(q_spec), q_p)) << "\n";
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::NoConvergence ? kNoConvergence : kBadInput;
  }
  return kBadInput;
}
