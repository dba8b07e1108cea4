#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "core/bdd.hpp"
#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace lbdd {

// Grid s in Z_p^n; yields f(s) = s - p * BDD((Bs - t)/p) in coefficients,
// i.e. Bs - p*BDD((Bs - t)/p) in the ambient space.
struct EnumerationGrid {
  std::int64_t p = 2;
  std::vector<double> target;
  const BddDecoder* decoder = nullptr;

  int rank() const { return decoder->basis().rank(); }
  // p^n; throws BudgetExceeded past 2^62.
  std::uint64_t size() const;
  // Row-major: the last coordinate varies fastest.
  IntVector point(std::uint64_t index) const;
  // f(s), or nothing when the decoder declines.
  std::optional<LatticePoint> yield(const IntVector& s) const;
};

// Calls visit(index, s, yield) for every grid point in row-major order.
void enumerate_via_bdd(const EnumerationGrid& grid,
                       const std::function<void(std::uint64_t, const IntVector&,
                                                const std::optional<LatticePoint>&)>& visit);

// Distinct yields, sorted.
std::vector<LatticePoint> enumeration_yield_set(const EnumerationGrid& grid, int workers = 1);

enum class DecoderKind { kExact, kGaussian };
enum class CapRadiusPolicy { kAlpha, kOptimal };

struct SolverOptions {
  DecoderKind decoder = DecoderKind::kExact;
  int workers = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;
  BddOptions bdd;
  // Tradeoff solver: full grids up to this rank, sub-sampled above.
  int full_grid_max_n = 5;
  std::uint64_t subsample_queries = 100'000;
  // Caps solver: stop after the first radius level that reaches lambda1.
  bool stop_on_success = true;
  CapRadiusPolicy cap_policy = CapRadiusPolicy::kAlpha;
};

struct CapLevel {
  double d = 0.0;
  double radius = 0.0;
  std::uint64_t targets = 0;
  // Targets whose p = 2 list contained a shortest vector.
  std::uint64_t successes = 0;
};

struct SolverRun {
  std::uint64_t seed = 0;
  std::uint64_t queries_made = 0;
  std::uint64_t candidates_seen = 0;
  std::uint64_t declined = 0;
  LatticePoint best;
  double best_norm = 0.0;
  double lambda1_oracle = 0.0;
  bool success = false;
  // False when the grid was sub-sampled.
  bool certifying = true;
  std::int64_t p = 0;
  double alpha = 0.0;
  // Effective eps of a Gaussian oracle, 0 for the exact decoder.
  double eps = 0.0;
  std::vector<CapLevel> levels;
};

struct QuantumCostReport {
  int n = 0;
  std::int64_t p = 3;
  double alpha = 0.0;
  double eps = 0.0;
  std::uint64_t classical_queries = 0;
  // ceil(p^{n/2}) minimum-finding queries.
  std::uint64_t quantum_queries = 0;
  // log2 of the per-query cost divided by n: log2(1/eps) / (2n).
  double per_query_cost_exponent = 0.0;

  // n * (log2(p)/2 + per_query_cost_exponent).
  double exponent_sum() const;
};

// Exact integer ceil(p^{n/2}).
std::uint64_t quantum_query_count(std::int64_t p, int n);
QuantumCostReport quantum_cost_report(int n, std::int64_t p, double alpha, double eps);

// Oracle whose dual samples come from the combiner pipeline (modulus q).
BddOracle build_bdd_oracle_via_pipeline(const LatticeBasis& basis, double eps, std::int64_t q,
                                        RngStream& rng, const BddOptions& opts = {});

// Grid p = 10q, t = 0, decoding radius 0.1/q.
SolverRun svp_tradeoff(const LatticeBasis& basis, std::int64_t q, RngStream& rng,
                       const SolverOptions& opts = {});

inline constexpr double kShiftedMinAlpha = 0.3334;

// p = 3, t = 0; the zero yield gets the key |B e1| + 1.
std::pair<SolverRun, QuantumCostReport> svp_shifted_min(const LatticeBasis& basis, RngStream& rng,
                                                        const SolverOptions& opts = {});

inline constexpr double kCapAlpha = 0.4097;

// Cap centre radius for level distance d.
double cap_radius(int n, double alpha, double d, CapRadiusPolicy policy);

// Uniform sphere targets at radius alpha(1-1/n) d_i with d_i = d/(1+1/n)^i,
// i = 0..n^2, `budget` targets per level, p = 2 enumeration around each.
SolverRun svp_spherical_caps(const LatticeBasis& basis, double alpha, std::uint64_t budget,
                             RngStream& rng, const SolverOptions& opts = {});

// Fraction of `targets` uniform sphere targets at `radius` whose p = 2 list
// contains a vector of norm lambda1.
CapLevel cap_success_rate(const BddDecoder& decoder, double radius, std::uint64_t targets,
                          RngStream& rng, int workers = 1);

std::vector<double> sample_unit_sphere(int n, RngStream& rng);

}  // namespace lbdd
