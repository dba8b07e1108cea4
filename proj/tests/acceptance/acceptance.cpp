// Acceptance gate: one line per criterion, "criterion=N pass=0|1 ...".
// A criterion passes when every underlying check passes within its time limit.
// Exit status is the number of failed criteria.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "core/log.hpp"
#include "core/verify.hpp"

namespace {

using lbdd::Verdict;

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<std::vector<Verdict>()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<int> only;
  bool verbose = false;
  CLI::App app{"acceptance criteria"};
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--workers", workers)->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--only", only, "criterion numbers to run");
  app.add_flag("--verbose", verbose, "also print the underlying verdict lines");
  CLI11_PARSE(app, argc, argv);
  lbdd::init_logging();

  const int w = workers;
  const std::vector<Criterion> criteria = {
      {1, "cost-endpoints", 10, [] { return std::vector{lbdd::check_cost_endpoints()}; }},
      {2, "bdd-exponents-and-cap-constants", 1,
       [] { return std::vector{lbdd::check_bdd_exponents(), lbdd::check_cap_constants()}; }},
      {3, "combiner-distribution", 600,
       [&] { return std::vector{lbdd::check_combiner_distribution(0, 0, 100'000, seed, w)}; }},
      {4, "enumeration-completeness", 300,
       [&] { return std::vector{lbdd::check_enumeration_completeness(50, 5, {2, 3}, seed, w)}; }},
      {5, "svp-end-to-end", 900,
       [&] {
         return std::vector{lbdd::check_shifted_min_exact(50, 6, seed, w), lbdd::check_caps_exact(50, 6, 60, seed, w),
                            lbdd::check_shifted_min_gaussian(5, 10, seed, w)};
       }},
      {6, "coset-uniformity", 300,
       [&] { return std::vector{lbdd::check_coset_uniformity({2, 3}, 4, {0.5, 0.1}, 1'000'000, seed, w)}; }},
      {7, "gaussian-numeric-suites", 600,
       [&] {
         return std::vector{lbdd::check_convolution({0.5, 0.1}, 400'000, seed, w), lbdd::check_coset_mass_ratio(20, seed),
                            lbdd::check_scaled_smoothing(20, seed), lbdd::check_dual_smoothing_lambda(20, seed)};
       }},
      {8, "quantum-accounting", 1, [] { return std::vector{lbdd::check_quantum_exponent()}; }},
  };

  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const auto verdicts = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool checks_ok = true;
    std::string props;
    for (const auto& v : verdicts) {
      checks_ok = checks_ok && v.pass;
      props += fmt::format("{}{}:{}", props.empty() ? "" : ",", v.property, v.pass ? "pass" : "fail");
    }
    const bool in_time = secs < c.limit_seconds;
    const bool pass = checks_ok && in_time;
    failed += !pass;
    fmt::print("criterion={} name={} pass={} checks={} seconds={:.3f} limit={:.0f}\n", c.id, c.name, pass ? 1 : 0,
               props, secs, c.limit_seconds);
    if (verbose || !pass)
      for (const auto& v : verdicts) fmt::print("  {}\n", v.line());
    std::fflush(stdout);
  }
  return failed;
}
