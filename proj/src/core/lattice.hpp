#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace lbdd {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using IntVector = std::vector<std::int64_t>;
// Row-major square integer matrix.
using IntMatrix = std::vector<IntVector>;

inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;

// Floating Gram-Schmidt data. Computed exactly in rationals and rounded, so
// every entry carries at most `relative_error` relative error.
struct Orthogonalization {
  std::vector<std::vector<double>> vectors;  // b~_i
  std::vector<double> sq_norms;              // |b~_i|^2
  std::vector<std::vector<double>> mu;       // mu[i][j], j < i
  double relative_error = 0.0;
};

// Full-rank lattice basis with rational generators b_0..b_{n-1}. Immutable;
// construction verifies linear independence and caches the exact inverse and
// Gram-Schmidt data.
class LatticeBasis {
 public:
  // columns[i] is the generator b_i. Throws SingularBasis.
  static LatticeBasis from_columns(std::vector<RationalVector> columns);
  static LatticeBasis from_integer_columns(const std::vector<IntVector>& columns);
  static LatticeBasis identity(int n);

  int rank() const { return static_cast<int>(columns_.size()); }
  const std::vector<RationalVector>& columns() const { return columns_; }
  const RationalVector& column(int i) const { return columns_[i]; }
  const std::vector<std::vector<double>>& columns_double() const { return columns_d_; }
  const Orthogonalization& gso() const { return gso_; }
  // Rows of B^{-1}; row i is the dual generator b*_i.
  const std::vector<RationalVector>& inverse_rows() const { return inverse_rows_; }
  const std::vector<std::vector<double>>& inverse_rows_double() const { return inverse_d_; }
  // |det B|, exact.
  const Rational& abs_determinant() const { return abs_det_; }
  double max_gso_norm() const;

  RationalVector embed(std::span<const std::int64_t> coeffs) const;
  std::vector<double> embed_double(std::span<const std::int64_t> coeffs) const;
  // Real coordinates xi with B*xi = x.
  std::vector<double> coordinates(std::span<const double> x) const;
  RationalVector coordinates_exact(const RationalVector& x) const;

  // Basis of the lattice factor * L.
  LatticeBasis scaled(const Rational& factor) const;
  bool operator==(const LatticeBasis& other) const { return columns_ == other.columns_; }

 private:
  explicit LatticeBasis(std::vector<RationalVector> columns);

  std::vector<RationalVector> columns_;
  std::vector<std::vector<double>> columns_d_;
  std::vector<RationalVector> inverse_rows_;
  std::vector<std::vector<double>> inverse_d_;
  Rational abs_det_;
  Orthogonalization gso_;
};

// A lattice vector identified by its integer coefficients z; the ambient
// embedding B*z is derived from the basis on demand.
struct LatticePoint {
  IntVector coeffs;

  bool is_zero() const;
  LatticePoint operator+(const LatticePoint& other) const;
  LatticePoint operator-(const LatticePoint& other) const;
  LatticePoint operator-() const;
  LatticePoint scaled(std::int64_t k) const;
  bool operator==(const LatticePoint&) const = default;
  auto operator<=>(const LatticePoint&) const = default;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

// Residues of a point's coefficients modulo q; identifies a coset of L/qL.
struct CosetLabel {
  IntVector residues;
  std::int64_t modulus = 2;

  CosetLabel operator+(const CosetLabel& other) const;
  CosetLabel operator-(const CosetLabel& other) const;
  bool is_zero() const;
  // Mixed-radix index in [0, q^n).
  std::uint64_t index() const;
  static CosetLabel from_index(std::uint64_t index, int n, std::int64_t q);
  static CosetLabel zero(int n, std::int64_t q);
  bool operator==(const CosetLabel&) const = default;
};

CosetLabel coset_label(const LatticePoint& point, std::int64_t q);

struct DualBasis {
  // Generators b*_i of L*, with <b*_i, b_j> = delta_ij.
  LatticeBasis lattice;
};

DualBasis dual_basis(const LatticeBasis& basis);
// Exact check of <b*_i, b_j> = delta_ij.
bool pairing_is_identity(const DualBasis& dual, const LatticeBasis& basis);

Orthogonalization gram_schmidt(const LatticeBasis& basis);

struct LllReduction {
  LatticeBasis basis;
  // reduced column i = sum_j original column j * transform[j][i]
  IntMatrix transform;
};

LllReduction lll_reduce(const LatticeBasis& basis, double delta = 0.99);
bool is_lll_reduced(const LatticeBasis& basis, double delta = 0.99);

// Fincke-Pohst enumeration over an LLL-reduced copy of the basis. Results are
// reported in coefficients of the basis given at construction.
class LatticeEnumerator {
 public:
  explicit LatticeEnumerator(const LatticeBasis& basis,
                             std::uint64_t node_budget = kDefaultNodeBudget);

  const LatticeBasis& basis() const { return basis_; }
  const LatticeBasis& reduced() const { return reduction_.basis; }
  std::uint64_t node_budget() const { return node_budget_; }

  // Calls visit(coeffs, sq_dist) for every point with |Bz - center| <= radius
  // (floating test with radius inflated by the GSO error bound; no exact
  // boundary filtering). Throws BudgetExceeded.
  void visit_within(std::span<const double> center, double radius,
                    const std::function<void(const IntVector&, double)>& visit) const;

  // Exactly the points with |Bz - center| <= radius, sorted by norm then
  // lexicographically by coefficients.
  std::vector<LatticePoint> within(std::span<const double> center, double radius) const;

  // Closest lattice point (exact comparison, lexicographic tie-break).
  LatticePoint closest(std::span<const double> target) const;
  // Closest point if it lies within `radius` of the target.
  std::optional<LatticePoint> closest_within(std::span<const double> target, double radius) const;

  // Shortest nonzero vector, lexicographically smallest among ties.
  const LatticePoint& shortest() const;
  double lambda1() const;
  const Rational& lambda1_squared() const;

  // Babai nearest-plane on the reduced basis; coefficients in the original basis.
  LatticePoint babai(std::span<const double> target) const;

  Rational exact_sq_distance(const LatticePoint& p, std::span<const double> target) const;

 private:
  struct ShortestCache;

  IntVector to_original(const IntVector& reduced_coeffs) const;
  const ShortestCache& shortest_cache() const;

  LatticeBasis basis_;
  LllReduction reduction_;
  std::uint64_t node_budget_;
  // Computed once on first use; shared so copies stay cheap and thread-safe.
  std::shared_ptr<ShortestCache> shortest_;
};

std::vector<LatticePoint> enumerate_within(const LatticeBasis& basis, std::span<const double> center,
                                           double radius,
                                           std::uint64_t node_budget = kDefaultNodeBudget);
LatticePoint shortest_vector_oracle(const LatticeBasis& basis,
                                    std::uint64_t node_budget = kDefaultNodeBudget);

Rational sq_norm_exact(const RationalVector& v);
double sq_norm(std::span<const double> v);
double to_double(const Rational& r);
// Nearest integer, halves rounded up.
mpz_class round_nearest(const Rational& r);

// Basis text format: first non-comment line n, then n lines holding the
// generators b_1..b_n, each as n entries "p/q" or integers. '#' starts a comment.
LatticeBasis parse_basis(const std::string& text);
LatticeBasis load_basis(const std::string& path);
std::string format_basis(const LatticeBasis& basis);

// Random nonsingular integer basis with entries in [-bound, bound].
LatticeBasis random_integer_basis(int n, std::int64_t bound, RngStream& rng);

}  // namespace lbdd
