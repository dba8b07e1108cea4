#include <gtest/gtest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/lattice.hpp"

namespace lbdd {
namespace {

TEST(LatticeBasis, IdentityGso) {
  auto b = LatticeBasis::identity(3);
  const auto& g = b.gso();
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g.sq_norms[i], 1.0);
  EXPECT_EQ(b.abs_determinant(), 1);
}

TEST(LatticeBasis, ShearedGso) {
  auto b = LatticeBasis::from_integer_columns({{1, 0}, {1, 1}});
  const auto& g = b.gso();
  EXPECT_DOUBLE_EQ(g.sq_norms[0], 1.0);
  EXPECT_DOUBLE_EQ(g.sq_norms[1], 1.0);
  EXPECT_DOUBLE_EQ(g.mu[1][0], 1.0);
  EXPECT_DOUBLE_EQ(g.vectors[1][0], 0.0);
  EXPECT_DOUBLE_EQ(g.vectors[1][1], 1.0);
}

TEST(LatticeBasis, SingularRejected) {
  EXPECT_THROW(LatticeBasis::from_integer_columns({{1, 2}, {2, 4}}), SingularBasis);
}

TEST(Lll, ReducesSkewedBasis) {
  auto b = LatticeBasis::from_integer_columns({{201, 0}, {200, 1}});
  auto red = lll_reduce(b);
  EXPECT_TRUE(is_lll_reduced(red.basis));
  EXPECT_LE(std::sqrt(to_double(sq_norm_exact(red.basis.column(0)))), std::sqrt(2.0) + 1e-12);
  EXPECT_EQ(red.basis.abs_determinant(), b.abs_determinant());
  // transform reproduces the reduced columns
  for (int i = 0; i < 2; ++i) {
    IntVector z = {red.transform[0][i], red.transform[1][i]};
    EXPECT_EQ(b.embed(z), red.basis.column(i));
  }
}

TEST(Dual, DiagonalTwo) {
  auto b = LatticeBasis::from_integer_columns({{2, 0}, {0, 2}});
  auto d = dual_basis(b);
  EXPECT_EQ(d.lattice.column(0), (RationalVector{Rational(1, 2), 0}));
  EXPECT_EQ(d.lattice.column(1), (RationalVector{0, Rational(1, 2)}));
}

TEST(Dual, RandomPairingExact) {
  RngStream rng(7, 0);
  for (int t = 0; t < 5; ++t) {
    auto b = random_integer_basis(5, 9, rng);
    auto d = dual_basis(b);
    EXPECT_TRUE(pairing_is_identity(d, b));
    EXPECT_EQ(d.lattice.abs_determinant() * b.abs_determinant(), 1);
  }
}

TEST(Enumerate, MatchesBoxScan) {
  RngStream rng(11, 0);
  auto b = random_integer_basis(3, 4, rng);
  std::vector<double> c = {0.3, -0.7, 1.1};
  double r = 4.5;
  auto pts = enumerate_within(b, c, r);
  // Independent scan over a coefficient box large enough to hold the ball.
  double maxdual = 0;
  for (const auto& row : b.inverse_rows_double()) maxdual = std::max(maxdual, std::sqrt(sq_norm(row)));
  auto xi = b.coordinates(c);
  int64_t lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    lo[i] = static_cast<int64_t>(std::floor(xi[i] - r * maxdual)) - 1;
    hi[i] = static_cast<int64_t>(std::ceil(xi[i] + r * maxdual)) + 1;
  }
  size_t count = 0;
  for (int64_t a = lo[0]; a <= hi[0]; ++a)
    for (int64_t bb = lo[1]; bb <= hi[1]; ++bb)
      for (int64_t cc = lo[2]; cc <= hi[2]; ++cc) {
        IntVector z = {a, bb, cc};
        auto v = b.embed_double(z);
        double s = 0;
        for (int i = 0; i < 3; ++i) s += (v[i] - c[i]) * (v[i] - c[i]);
        if (s <= r * r) {
          ++count;
          EXPECT_NE(std::find(pts.begin(), pts.end(), LatticePoint{z}), pts.end());
        }
      }
  EXPECT_EQ(pts.size(), count);
  EXPECT_GT(count, 0u);
}

TEST(Enumerate, BudgetEnforced) {
  auto b = LatticeBasis::identity(6);
  std::vector<double> c(6, 0.0);
  EXPECT_THROW(enumerate_within(b, c, 5.0, 100), BudgetExceeded);
}

TEST(Shortest, HalfDiagonal) {
  auto b = LatticeBasis::from_columns({{1, 0}, {Rational(1, 2), Rational(1, 2)}});
  LatticeEnumerator e(b);
  EXPECT_EQ(e.lambda1_squared(), Rational(1, 2));
  EXPECT_NEAR(e.lambda1(), std::sqrt(0.5), 1e-15);
  EXPECT_FALSE(e.shortest().is_zero());
}

TEST(Closest, ExactTieBreak) {
  auto b = LatticeBasis::identity(2);
  LatticeEnumerator e(b);
  std::vector<double> t = {0.5, 0.25};
  auto p = e.closest(t);
  // (0,0) and (1,0) tie; lexicographic smaller wins.
  EXPECT_EQ(p.coeffs, (IntVector{0, 0}));
  EXPECT_FALSE(e.closest_within(t, 0.5).has_value());
  EXPECT_TRUE(e.closest_within(t, 0.56).has_value());
}

TEST(Coset, Labels) {
  auto a = coset_label(LatticePoint{{3, -1}}, 2);
  EXPECT_EQ(a.residues, (IntVector{1, 1}));
  auto z = coset_label(LatticePoint{{4, 8}}, 4);
  EXPECT_TRUE(z.is_zero());
  LatticePoint x{{5, -3, 2}}, y{{-7, 4, 9}};
  for (int64_t q : {2, 3, 5}) {
    EXPECT_EQ(coset_label(x + y, q), coset_label(x, q) + coset_label(y, q));
    auto l = coset_label(x, q);
    EXPECT_EQ(CosetLabel::from_index(l.index(), 3, q), l);
  }
}

TEST(Parse, RoundTrip) {
  auto b = parse_basis("# comment\n2\n1 1/2\n0.25 -3\n");
  EXPECT_EQ(b.column(0), (RationalVector{1, Rational(1, 2)}));
  EXPECT_EQ(b.column(1), (RationalVector{Rational(1, 4), -3}));
  EXPECT_EQ(parse_basis(format_basis(b)), b);
  EXPECT_THROW(parse_basis("2\n1 0\n"), ParseError);
}

TEST(Scaled, Determinant) {
  auto b = LatticeBasis::from_integer_columns({{2, 1}, {0, 3}});
  EXPECT_EQ(b.scaled(Rational(1, 2)).abs_determinant(), b.abs_determinant() / 4);
}

}  // namespace
}  // namespace lbdd
