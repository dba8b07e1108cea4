#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace lbdd {

inline constexpr double kTailMass = 1e-12;

// exp(-pi * |x|^2 / s^2)
double rho(double sq_norm, double s);

// Radius beyond which the Gaussian mass of a rank-n lattice is below tau.
double tail_radius(double s, int n, double tau = kTailMass);

// Sum of rho_s(x - shift) over lattice points x within `radius` of shift.
double rho_mass(const LatticeBasis& basis, std::span<const double> shift, double s, double radius,
                std::uint64_t node_budget = kDefaultNodeBudget);
// Same, with the radius taken from tail_radius().
double rho_mass(const LatticeBasis& basis, std::span<const double> shift, double s);

// Tabulated D_{L,s,c}: every point within the tail radius with its
// probability, sampled by inverse CDF.
class ExactSampler {
 public:
  ExactSampler(const LatticeBasis& basis, double s, std::span<const double> center = {},
               std::uint64_t node_budget = kDefaultNodeBudget);

  LatticePoint sample(RngStream& rng) const;
  std::size_t sample_index(RngStream& rng) const;

  double width() const { return s_; }
  const std::vector<LatticePoint>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probs_; }
  // Probability of a point (0 outside the table).
  double probability(const LatticePoint& p) const;
  double total_mass() const { return mass_; }

 private:
  double s_;
  std::vector<LatticePoint> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> index_;
  double mass_ = 0.0;
};

LatticePoint exact_dgs_sample(const LatticeBasis& basis, double s, RngStream& rng);

// D_{Z,s,c} by rejection from a uniform window.
std::int64_t sample_integer_gaussian(double s, double c, RngStream& rng);

// Randomized nearest plane on an LLL-reduced copy of the basis.
class KleinSampler {
 public:
  KleinSampler(const LatticeBasis& basis, double s);

  // Smallest s the sampler accepts for this basis.
  static double min_width(const LatticeBasis& basis);

  LatticePoint sample(RngStream& rng) const;
  // Sample from D_{L,s,c}.
  LatticePoint sample(RngStream& rng, std::span<const double> center) const;
  double width() const { return s_; }

 private:
  LatticeBasis basis_;
  LllReduction reduction_;
  double s_;
};

LatticePoint klein_sample(const LatticeBasis& basis, double s, RngStream& rng);

struct SmoothingEstimate {
  double eps = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  // Dual points beyond this radius were dropped from the theta series.
  double truncation_radius = 0.0;

  double value() const { return s_hi; }
};

// eta_eps(L) by bisection on the dual theta series sum_{w != 0} rho_{1/s}(w) = eps.
SmoothingEstimate smoothing_parameter(const LatticeBasis& basis, double eps,
                                      std::uint64_t node_budget = kDefaultNodeBudget);

// The eps for which s = eta_eps(L): sum over nonzero w in L* of rho_{1/s}(w).
double smoothing_eps(const LatticeBasis& basis, double s,
                     std::uint64_t node_budget = kDefaultNodeBudget);

double statistical_distance(std::span<const double> p, std::span<const double> q);

struct GofResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins = 0;

  bool passes(double alpha = 0.01) const { return p_value > alpha; }
};

// Chi-square goodness of fit. Categories are merged (in order of decreasing
// expected count) until every bin expects at least min_expected; probability
// mass missing from `expected` forms an extra category.
GofResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected,
                         double min_expected = 10.0);

// GOF of lattice points against a tabulated distribution.
GofResult chi_square_gof(std::span<const LatticePoint> samples, const ExactSampler& reference,
                         double min_expected = 10.0);

// Statistical distance of the empirical coset distribution from uniform on L/qL.
double coset_distance_from_uniform(std::span<const LatticePoint> points, int n, std::int64_t q);

}  // namespace lbdd
