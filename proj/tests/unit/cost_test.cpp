#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/cost.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace lbdd {
namespace {

constexpr double kLn2 = std::numbers::ln2;

TEST(Alpha, SmallEps) {
  EXPECT_DOUBLE_EQ(alpha_small_eps(1.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(alpha_small_eps(3.0, 0.0), 0.5);
  // 4b/5 lies inside the domain only for b >= 0.40075.
  for (double b : {0.402, 0.45, 0.6}) EXPECT_NEAR(alpha_small_eps(0.8 * b, b), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(alpha_small_eps(0.8216, 0.402), 0.4097, 5e-4);
  EXPECT_THROW(alpha_small_eps(0.1, 0.402), OutOfDomain);
  EXPECT_THROW(alpha_small_eps(0.5, 0.0), OutOfDomain);
}

TEST(Alpha, LargeEps) {
  for (double A : {0.1, 0.5, 1.3}) EXPECT_NEAR(alpha_large_eps(A, 1.2), alpha_large_eps(A, 0.2) / 2, 1e-15);
  // Peak at A = 1/(2 ln 2).
  const double peak = 1 / (2 * kLn2);
  EXPECT_GT(alpha_large_eps(peak, 0), alpha_large_eps(peak - 1e-3, 0));
  EXPECT_GT(alpha_large_eps(peak, 0), alpha_large_eps(peak + 1e-3, 0));
  EXPECT_NEAR(alpha_large_eps(peak, 0), 0.5, 1e-12);
}

TEST(Alpha, LargeEpsRoot) {
  for (double b : {0.0, 0.2, 0.402}) {
    auto A = large_eps_root(b);
    ASSERT_TRUE(A);
    EXPECT_NEAR(alpha_large_eps(*A, b), 1.0 / 3.0, 1e-12);
    // Relation c = log2 3 + A/2 form of the same root.
    const double c = std::log2(3.0) + *A / 2;
    const double lhs = std::sqrt(2 * c - 2 * std::log2(3.0)) * std::exp2(-2 * c + 2 * std::log2(3.0));
    EXPECT_NEAR(lhs, std::sqrt(2 / (std::numbers::e * kLn2)) / 3 * std::exp2(b), 1e-12);
  }
  EXPECT_FALSE(large_eps_root(0.7));
}

TEST(Alpha, RegimesAgreeAtBoundary) {
  // At A = 1/(2 ln 2) - b the small-eps value is not below the large-eps one.
  for (double b = 0.0; b <= 0.402; b += 0.01) {
    const double A = std::max(1 / (2 * kLn2) - b, 0.8 * b);
    EXPECT_GE(alpha_small_eps(A, b), alpha_large_eps(A, b) - 1e-6) << b;
  }
}

TEST(CapAngle, Examples) {
  auto g = cap_angle(1.0 / 3.0, CapPolicy::kAlpha);
  EXPECT_DOUBLE_EQ(g.r, 1.0 / 3.0);
  EXPECT_NEAR(g.phi, 0.0, 1e-7);
  g = cap_angle(0.4097, CapPolicy::kAlpha);
  const double c = (1 + 0.4097 * 0.4097 - 4 * 0.4097 * 0.4097) / (2 * 0.4097);
  EXPECT_NEAR(std::cos(g.phi), c, 1e-15);
  EXPECT_NEAR(std::cos(g.phi), 0.6059, 1e-3);
  EXPECT_NEAR(g.phi, 0.9198, 1e-3);
  g = cap_angle(0.45, CapPolicy::kOptimal);
  EXPECT_NEAR(g.r, std::sqrt(1 - 0.81), 1e-15);
  g = cap_angle(0.5, CapPolicy::kOptimal);
  EXPECT_DOUBLE_EQ(g.phi, std::numbers::pi / 2);
  EXPECT_THROW(cap_angle(0.2, CapPolicy::kAlpha), OutOfDomain);
  EXPECT_THROW(cap_angle(0.6, CapPolicy::kAlpha), OutOfDomain);
}

TEST(CapExponent, Examples) {
  EXPECT_NEAR(cap_fraction_exponent(std::numbers::pi / 2), 0.0, 1e-15);
  EXPECT_NEAR(cap_fraction_exponent(std::numbers::pi / 6), 1.0, 1e-15);
  EXPECT_NEAR(cap_fraction_exponent(cap_angle(0.4097, CapPolicy::kAlpha).phi), 0.3298, 5e-4);
  EXPECT_THROW(cap_fraction_exponent(0.0), OutOfDomain);
}

TEST(CapExponent, QuadratureAt64) {
  // Away from pi/2, where the polynomial factor is not sqrt(n).
  for (double phi : {0.5, 0.9198, 1.2})
    EXPECT_NEAR(cap_fraction_exponent_quadrature(phi, 64), cap_fraction_exponent(phi), 0.02) << phi;
}

TEST(Capping, Endpoints) {
  EXPECT_NEAR(capping_exponent(0.402, EpsRegime::kSmall, false).c, 1.741, 1e-3);
  EXPECT_NEAR(capping_exponent(0.0, EpsRegime::kLarge, false).c, 1.292, 1e-3);
  EXPECT_NEAR(capping_exponent(0.0, EpsRegime::kLarge, true).c, 0.750, 1e-3);
  // Computed value of the small-eps endpoint, frozen.
  EXPECT_NEAR(capping_exponent(0.402, EpsRegime::kSmall, false).c, 1.740633, 1e-6);
}

TEST(Capping, AlphaPolicyEndpoint) {
  // The alpha policy reaches the same small-eps endpoint (r = alpha is optimal there).
  EXPECT_NEAR(capping_exponent(0.402, EpsRegime::kSmall, false, CapPolicy::kAlpha).c, 1.740633, 1e-6);
}

TEST(Capping, MinimizerMatchesGridScan) {
  RngStream rng(80, 0);
  for (auto regime : {EpsRegime::kSmall, EpsRegime::kLarge})
    for (bool q : {false, true})
      for (int t = 0; t < 5; ++t) {
        const double b = 0.402 * rng.uniform();
        const double lo = regime == EpsRegime::kSmall ? small_eps_min_A(b) : 1e-9;
        double best = INFINITY;
        const int N = 1'000'000;
        for (int i = 0; i <= N; ++i)
          best = std::min(best, capping_cost(lo + (6.0 - lo) * i / N, b, regime, q, CapPolicy::kOptimal));
        const double got = capping_exponent(b, regime, q).c;
        EXPECT_LE(got, best + 1e-9);
        EXPECT_NEAR(got, best, 1e-6) << b;
      }
}

TEST(Minfind, Endpoints) {
  auto p = minfind_exponent(0.402, true);
  EXPECT_NEAR(p.c, 0.9535, 1e-3);
  EXPECT_NEAR(p.A, 0.322, 1e-3);
  EXPECT_NEAR(bdd_query_exponent(p.A), 0.161, 1e-3);
  auto c0 = minfind_exponent(0.0, false);
  EXPECT_NEAR(c0.A, *large_eps_root(0.0), 1e-15);
  // Root of alpha_large = 1/3 at b = 0 by an independent high-precision solve.
  EXPECT_NEAR(c0.A, 0.1440007, 1e-7);
  EXPECT_NEAR(c0.c, 1.656963, 1e-6);
  // The small-eps corner A = 4b/5 = 0.3216 lies just below the large-eps root.
  EXPECT_NEAR(p.A, 0.3216, 1e-12);
  EXPECT_NEAR(p.c, 0.953281, 1e-6);
}

TEST(BddExponents, Identities) {
  EXPECT_NEAR(bdd_query_exponent(0.322), 0.161, 1e-12);
  EXPECT_NEAR(bdd_build_exponent(0.322), 0.661, 1e-12);
  EXPECT_NEAR(bdd_query_exponent(0.8216), 0.4108, 1e-12);
  EXPECT_NEAR(bdd_build_exponent(0.8216), 0.9108, 1e-12);
}

TEST(Curves, ShapeAndOrdering) {
  for (auto v : CurveVariant::all()) {
    auto rows = emit_curve(v);
    ASSERT_EQ(rows.size(), 202u) << v.name();
    EXPECT_DOUBLE_EQ(rows.back().b, 0.402);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ASSERT_TRUE(rows[i].feasible);
      EXPECT_GE(rows[i].c, rows[i - 1].c - 1e-9) << v.name() << " " << rows[i].b;
    }
    if (v.quantum) {
      auto cl = emit_curve({v.family, false});
      for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_LE(rows[i].c, cl[i].c + 1e-12);
    }
  }
}

TEST(Curves, CrossoverStructure) {
  const auto at = [](CurveFamily f, bool q, double b) { return curve_point({f, q}, b).c; };
  // b = 0.402: small-eps capping is the best classical curve, minfind the best quantum one.
  EXPECT_LE(at(CurveFamily::kCapSmallEps, false, 0.402), at(CurveFamily::kCapLargeEps, false, 0.402));
  EXPECT_LE(at(CurveFamily::kCapSmallEps, false, 0.402), at(CurveFamily::kMinfind, false, 0.402));
  EXPECT_LE(at(CurveFamily::kMinfind, true, 0.402), at(CurveFamily::kCapSmallEps, true, 0.402));
  EXPECT_LE(at(CurveFamily::kMinfind, true, 0.402), at(CurveFamily::kCapLargeEps, true, 0.402));
  // b = 0: large-eps capping wins in both models.
  for (bool q : {false, true}) {
    EXPECT_LE(at(CurveFamily::kCapLargeEps, q, 0.0), at(CurveFamily::kCapSmallEps, q, 0.0));
    EXPECT_LE(at(CurveFamily::kCapLargeEps, q, 0.0), at(CurveFamily::kMinfind, q, 0.0));
  }
}

TEST(Curves, WorkerInvariant) {
  const CurveVariant v{CurveFamily::kCapLargeEps, true};
  EXPECT_EQ(curve_csv(emit_curve(v, kCurveStep, CapPolicy::kOptimal, 1)),
            curve_csv(emit_curve(v, kCurveStep, CapPolicy::kOptimal, 3)));
}

TEST(Curves, VariantNames) {
  EXPECT_EQ(CurveVariant::all().size(), 6u);
  for (auto v : CurveVariant::all()) EXPECT_EQ(CurveVariant::parse(v.name()).name(), v.name());
  EXPECT_THROW(CurveVariant::parse("nope"), ConfigError);
}

TEST(Curves, Golden) {
  for (auto v : CurveVariant::all()) {
    std::ifstream in(std::string(LBDD_GOLDEN_DIR) + "/" + v.name() + ".csv");
    ASSERT_TRUE(in) << v.name();
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(curve_csv(emit_curve(v)), ss.str()) << v.name();
  }
}

}  // namespace
}  // namespace lbdd
