#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/lattice.hpp"

namespace lbdd {

// Outcome of one property check. Failures are verdicts, not exceptions.
struct Verdict {
  std::string suite;
  std::string property;
  bool pass = false;
  // Space separated key=value pairs.
  std::string detail;
  double seconds = 0.0;

  // "verdict suite=... property=... pass=1 <detail> seconds=..."
  std::string line() const;
};

struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 1;
  int workers = 1;
  // Combiner suite overrides (0: built-in set of configurations).
  int combiner_n = 0;
  std::int64_t combiner_q = 0;
  // Basis used by the bdd and svp suites in addition to their random instances.
  std::optional<LatticeBasis> basis;
  // Called as each verdict completes.
  std::function<void(const Verdict&)> on_verdict;
};

std::vector<std::string> verify_suite_names();
// suite in verify_suite_names() or "all"; ConfigError otherwise.
std::vector<Verdict> run_verify_suite(const std::string& suite, const VerifyOptions& opts);

// Individual checks. Each one catches library errors and reports them in the detail.

// lattice
Verdict check_dual_pairing(int instances, std::uint64_t seed);
Verdict check_enumeration_box_scan(int instances, std::uint64_t seed);
Verdict check_lll_bound(int instances, std::uint64_t seed);
Verdict check_coset_homomorphism(int instances, std::uint64_t seed);

// gauss
// Coset SD of exact draws at s = eta_eps(qL) against 2 eps + 3 sqrt(q^n / draws),
// for every q in qs, n in 1..max_n, eps in epss.
Verdict check_coset_uniformity(const std::vector<std::int64_t>& qs, int max_n,
                               const std::vector<double>& epss, std::uint64_t draws,
                               std::uint64_t seed, int workers = 1);
Verdict check_coset_mass_ratio(int instances, std::uint64_t seed);
// y1 + y2 with y_i ~ D_{L, sqrt2 eta_eps(L)} against D_{L, 2 eta_eps(L)}.
Verdict check_convolution(const std::vector<double>& epss, std::uint64_t draws, std::uint64_t seed,
                          int workers = 1);
// k eta_eps(L) > eta_{eps^{k^2}}(L).
Verdict check_scaled_smoothing(int instances, std::uint64_t seed);
// sqrt(ln(1/eps)/pi) < lambda1(L) eta_eps(L*).
Verdict check_dual_smoothing_lambda(int instances, std::uint64_t seed);

// combiner
// Pooled outputs of combine_batch against the exact output-width Gaussian, plus
// the algebraic audit on every output. n = 0 picks the built-in configurations.
Verdict check_combiner_distribution(int n, std::int64_t q, std::uint64_t outputs, std::uint64_t seed,
                                    int workers = 1);
Verdict check_combiner_coset_blind(int n, std::int64_t q, std::uint64_t seed);
Verdict check_leftover_hash(int trials, std::uint64_t seed);
Verdict check_combiner_output_count(int runs, std::uint64_t seed);

// smoothing
Verdict check_dense_inclusion(int instances, std::uint64_t seed);
Verdict check_smoothing_rejection(std::uint64_t draws, std::uint64_t seed);

// bdd
Verdict check_bdd_periodicity(const LatticeBasis& basis, std::uint64_t seed);
Verdict check_bdd_radius_monotone(const LatticeBasis& basis, int trials, std::uint64_t seed);
Verdict check_bdd_alpha_chain(int instances, std::uint64_t seed);
Verdict check_bdd_oracle_reuse(const LatticeBasis& basis, std::uint64_t seed);

// svp
// Yield set of every p-grid contains enumerate_within(t, p alpha lambda1).
Verdict check_enumeration_completeness(int instances, int max_n, const std::vector<std::int64_t>& ps,
                                       std::uint64_t seed, int workers = 1);
Verdict check_shifted_min_exact(int instances, int max_n, std::uint64_t seed, int workers = 1);
Verdict check_caps_exact(int instances, int max_n, std::uint64_t budget, std::uint64_t seed,
                         int workers = 1);
// Shifted-min with the dual-sample oracle; pass when the success rate is >= 0.9
// over `seeds` seeds for each n in 2..max_n.
Verdict check_shifted_min_gaussian(int max_n, int seeds, std::uint64_t seed, int workers = 1);
// Per-target success rate on Z^n against the capture probability of the 2n caps.
Verdict check_cap_success_rate(int n, std::uint64_t targets, std::uint64_t seed, int workers = 1);
Verdict check_svp_on_basis(const LatticeBasis& basis, std::uint64_t seed, int workers = 1);
Verdict check_query_accounting();

// cost
Verdict check_cost_endpoints();
Verdict check_bdd_exponents();
Verdict check_cap_constants();
Verdict check_curve_shape(int workers = 1);
Verdict check_minimizer(int per_variant, int grid, std::uint64_t seed);
// n = 20 exponent sum against 0.9535 n within 0.02 n.
Verdict check_quantum_exponent();

}  // namespace lbdd
