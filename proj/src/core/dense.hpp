#pragma once

#include <cstdint>
#include <vector>

#include "core/batch.hpp"
#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace lbdd {

// L' = L + representatives of a rank-a subgroup of (L/2)/L, so that
// L <= L' <= L/2 and [L':L] = 2^a.
struct DenseSuperlattice {
  LatticeBasis base;
  LatticeBasis dense;
  int a = 0;
  // Reduced row echelon basis of the GF(2) subspace (a rows of n bits).
  std::vector<std::vector<std::uint8_t>> subspace;
  // Integer matrix H (columns) with dense = base * H / 2.
  IntMatrix half_coeffs;
  // base column i = sum_j dense column j * base_in_dense[j][i]
  IntMatrix base_in_dense;

  // Dense coefficients u of a point in L (base coefficients z), if it is one.
  bool contains_base_point(const IntVector& u, IntVector* z) const;
  // Exact check of L <= L' <= L/2 and of the index.
  bool verify() const;
};

// Uniformly random a-dimensional subspace of GF(2)^n as RREF rows.
std::vector<std::vector<std::uint8_t>> random_gf2_subspace(int n, int a, RngStream& rng);

DenseSuperlattice dense_superlattice(const LatticeBasis& basis, int a, RngStream& rng);

// ceil(n/2) + 4, capped at n - 1 (1 when n = 1).
int default_index_log(int n);

struct SmoothingSampleStats {
  std::uint64_t rounds = 0;
  std::uint64_t drawn = 0;
  std::uint64_t kept = 0;
  std::uint64_t distinct_subspaces = 0;
};

// m samples of D_{L,s} by rejection from dense superlattices. Checks
// s >= eta_{1/3}(L) when n <= 6 (WidthTooSmall otherwise).
GaussianBatch sample_at_smoothing(const LatticeBasis& basis, double s, std::uint64_t m,
                                  RngStream& rng, SmoothingSampleStats* stats = nullptr,
                                  bool check_width = true);

}  // namespace lbdd
