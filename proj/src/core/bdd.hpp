#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/rng.hpp"


namespace lbdd {

// Closest lattice point (lexicographic tie-break).
LatticePoint exact_bdd(const LatticeBasis& basis, std::span<const double> target,
                       std::uint64_t node_budget = kDefaultNodeBudget);

struct BddOptions {
  // m = ceil(c * n * log2(1/eps) / sqrt(eps))
  double sample_constant = 10.0;
  // Subtracted from ln(1/eps)/pi in the decoding radius.
  double conservative_slack = 0.0;
  double min_eps = 1e-6;
  double max_eps = 1.0 / 200.0;
  // Hard cap on m; BudgetExceeded beyond it.
  std::uint64_t max_samples = 4'000'000;
};

// Frozen dual Gaussian samples plus decoding metadata.
struct BddOracle {
  LatticeBasis basis;
  double eps = 0.0;
  double requested_eps = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double lambda1 = 0.0;
  std::uint64_t m = 0;
  double sample_constant = 10.0;
  double conservative_slack = 0.0;
  // Width of the dual samples (upper end of the eta_eps(L*) bracket).
  double dual_width = 0.0;
  // Dual samples as coefficients in the dual basis (rows of B^{-1}).
  std::vector<IntVector> dual_coeffs{};
  std::shared_ptr<const LatticeEnumerator> enumerator{};
  // Distinct dual samples (row-major, n per row) with their multiplicities;
  // the estimator sums over these.
  std::vector<double> unique_coeffs{};
  std::vector<double> multiplicity{};

  // Rebuilds enumerator and the compressed sample table.
  void finalize();
};

double bdd_alpha(double eps, double dual_eta, double lambda1, double slack = 0.0);
std::uint64_t bdd_sample_count(int n, double eps, double c);

// Builds the oracle from m samples of D_{L*, eta_eps(L*)}. eps is clamped to
// [min_eps, max_eps].
BddOracle build_bdd_oracle(const LatticeBasis& basis, double eps, RngStream& rng,
                           const BddOptions& opts = {});

// Oracle from externally produced dual samples (coefficients in the dual
// basis) drawn at width dual_width >= eta_eps(L*).
BddOracle oracle_from_samples(const LatticeBasis& basis, double eps, double dual_width,
                              std::vector<IntVector> dual_coeffs, const BddOptions& opts = {});

// Smallest eps on the geometric ladder max_eps, max_eps/2, ... (>= min_eps)
// whose decoding coefficient reaches target_alpha; the last rung otherwise.
double eps_for_alpha(const LatticeBasis& basis, double target_alpha, const BddOptions& opts = {});

// (1/m) sum_j cos(2 pi <w_j, x>), with coordinates reduced mod 1 exactly.
double periodic_gaussian_estimate(const BddOracle& oracle, const RationalVector& x);
double periodic_gaussian_estimate(const BddOracle& oracle, std::span<const double> x);

struct BddQueryReport {
  std::uint64_t estimator_calls = 0;
  std::uint64_t ascent_steps = 0;
  bool converged = false;
  double residual = 0.0;
};

inline constexpr int kAscentBudget = 200;

// Gradient ascent on the estimator from the target, then a Babai snap.
// Throws NotConverged when the step budget runs out.
LatticePoint bdd_decode(const BddOracle& oracle, std::span<const double> target,
                        BddQueryReport* report = nullptr);

void save_oracle(const std::string& path, const BddOracle& oracle);
BddOracle load_oracle(const std::string& path);

// Decoder used by the enumeration-based solvers: returns the decoded point or
// nothing when it declines.
class BddDecoder {
 public:
  virtual ~BddDecoder() = default;
  virtual std::optional<LatticePoint> decode(std::span<const double> target) const = 0;
  virtual double alpha() const = 0;
  virtual double lambda1() const = 0;
  virtual const LatticeBasis& basis() const = 0;
};

// Exact decoder restricted to distance alpha * lambda1.
class ExactBddDecoder : public BddDecoder {
 public:
  ExactBddDecoder(const LatticeBasis& basis, double alpha,
                  std::uint64_t node_budget = kDefaultNodeBudget);
  std::optional<LatticePoint> decode(std::span<const double> target) const override;
  double alpha() const override { return alpha_; }
  double lambda1() const override { return lambda1_; }
  const LatticeBasis& basis() const override { return en_.basis(); }

 private:
  LatticeEnumerator en_;
  double alpha_;
  double lambda1_;
};

// Decoder backed by a dual-sample oracle; NotConverged becomes "declined".
class GaussianBddDecoder : public BddDecoder {
 public:
  explicit GaussianBddDecoder(std::shared_ptr<const BddOracle> oracle) : oracle_(std::move(oracle)) {}
  std::optional<LatticePoint> decode(std::span<const double> target) const override;
  double alpha() const override { return oracle_->alpha; }
  double lambda1() const override { return oracle_->lambda1; }
  const LatticeBasis& basis() const override { return oracle_->basis; }
  const BddOracle& oracle() const { return *oracle_; }

 private:
  std::shared_ptr<const BddOracle> oracle_;
};

}  // namespace lbdd
