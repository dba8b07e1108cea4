#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <set>

#include "core/errors.hpp"
#include "core/gauss.hpp"
#include "core/svp.hpp"

namespace lbdd {
namespace {

constexpr double kPi = std::numbers::pi;

std::set<LatticePoint> as_set(const std::vector<LatticePoint>& v) { return {v.begin(), v.end()}; }

bool includes(const std::set<LatticePoint>& big, const std::vector<LatticePoint>& small) {
  for (const auto& p : small)
    if (!big.count(p)) return false;
  return true;
}

TEST(Grid, RowMajorOrder) {
  ExactBddDecoder dec(LatticeBasis::identity(2), 0.3);
  EnumerationGrid g{3, {0, 0}, &dec};
  EXPECT_EQ(g.size(), 9u);
  EXPECT_EQ(g.point(0), (IntVector{0, 0}));
  EXPECT_EQ(g.point(1), (IntVector{0, 1}));
  EXPECT_EQ(g.point(3), (IntVector{1, 0}));
  EXPECT_EQ(g.point(8), (IntVector{2, 2}));
  std::vector<std::uint64_t> order;
  enumerate_via_bdd(g, [&](std::uint64_t i, const IntVector& s, const auto&) {
    order.push_back(i);
    EXPECT_EQ(s, g.point(i));
  });
  EXPECT_EQ(order.size(), 9u);
  EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
}

TEST(Grid, ZeroYield) {
  ExactBddDecoder dec(LatticeBasis::identity(3), 0.3);
  EnumerationGrid g{3, {0, 0, 0}, &dec};
  auto y = g.yield({0, 0, 0});
  ASSERT_TRUE(y);
  EXPECT_TRUE(y->is_zero());
}

TEST(Grid, Z2OffCentre) {
  auto b = LatticeBasis::identity(2);
  ExactBddDecoder dec(b, 0.45);
  std::vector<double> t = {0.44, 0.0};
  EnumerationGrid g{2, t, &dec};
  auto want = enumerate_within(b, t, 0.9);
  EXPECT_EQ(as_set(want), (std::set<LatticePoint>{{{0, 0}}, {{1, 0}}}));
  EXPECT_TRUE(includes(as_set(enumeration_yield_set(g)), want));
}

TEST(Grid, CompletenessRandom) {
  RngStream rng(50, 0);
  for (int inst = 0; inst < 50; ++inst) {
    auto b = random_integer_basis(4, 4, rng);
    const double alpha = 0.3;
    ExactBddDecoder dec(b, alpha);
    std::vector<double> t(4);
    for (auto& x : t) x = 3 * rng.uniform() - 1.5;
    EnumerationGrid g{3, t, &dec};
    auto yields = as_set(enumeration_yield_set(g));
    auto want = enumerate_within(b, t, 3 * alpha * dec.lambda1());
    EXPECT_TRUE(includes(yields, want)) << inst;
  }
}

TEST(Grid, WorkerInvariantYieldSet) {
  RngStream rng(51, 0);
  auto b = random_integer_basis(3, 5, rng);
  ExactBddDecoder dec(b, 0.4);
  EnumerationGrid g{3, {0.2, -0.7, 1.1}, &dec};
  EXPECT_EQ(enumeration_yield_set(g, 1), enumeration_yield_set(g, 3));
}

TEST(Tradeoff, Z3) {
  RngStream rng(52, 0);
  auto run = svp_tradeoff(LatticeBasis::identity(3), 4, rng);
  EXPECT_EQ(run.queries_made, 40u * 40u * 40u);
  EXPECT_EQ(run.p, 40);
  EXPECT_TRUE(run.certifying);
  EXPECT_TRUE(run.success);
  EXPECT_DOUBLE_EQ(run.best_norm, 1.0);
}

TEST(Tradeoff, UniqueShortestPair) {
  // +-(1,1,0) is the unique shortest pair (norm sqrt 2).
  auto b = LatticeBasis::from_integer_columns({{1, 1, 0}, {0, 3, 1}, {2, 0, 3}});
  LatticeEnumerator en(b);
  ASSERT_EQ(en.within(std::vector<double>(3, 0.0), en.lambda1()).size(), 3u);
  RngStream rng(53, 0);
  auto run = svp_tradeoff(b, 4, rng);
  const auto& v = en.shortest();
  EXPECT_TRUE(run.best == v || run.best == -v);
}

TEST(Tradeoff, SubsampledIsNonCertifying) {
  RngStream rng(54, 0);
  SolverOptions opts;
  opts.full_grid_max_n = 2;
  opts.subsample_queries = 500;
  auto run = svp_tradeoff(LatticeBasis::identity(3), 4, rng, opts);
  EXPECT_FALSE(run.certifying);
  EXPECT_EQ(run.queries_made, 500u);
  EXPECT_FALSE(run.best.is_zero());
}

TEST(Tradeoff, RejectsSmallQ) {
  RngStream rng(55, 0);
  EXPECT_THROW(svp_tradeoff(LatticeBasis::identity(2), 3, rng), ConfigError);
}

TEST(Tradeoff, PipelineOracle) {
  RngStream rng(56, 0);
  SolverOptions opts;
  opts.decoder = DecoderKind::kGaussian;
  auto run = svp_tradeoff(LatticeBasis::from_integer_columns({{2, 1}, {1, 3}}), 4, rng, opts);
  EXPECT_GT(run.eps, 0);
  EXPECT_GE(run.alpha, 0.1 / 4);
  EXPECT_TRUE(run.success);
}

TEST(ShiftedMin, ExactOracleFindsLambda1) {
  RngStream rng(57, 0);
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 2 + inst % 4;
    auto b = random_integer_basis(n, 5, rng);
    auto [run, rep] = svp_shifted_min(b, rng);
    EXPECT_FALSE(run.best.is_zero());
    EXPECT_TRUE(run.success) << inst;
    EXPECT_EQ(run.queries_made, rep.classical_queries);
  }
}

TEST(ShiftedMin, NeverZero) {
  // Long first basis vector: the sentinel key is large but still loses to
  // every short yield.
  auto b = LatticeBasis::from_integer_columns({{7, 1}, {1, 0}});
  RngStream rng(58, 0);
  auto [run, rep] = svp_shifted_min(b, rng);
  EXPECT_FALSE(run.best.is_zero());
  EXPECT_TRUE(run.success);
}

TEST(ShiftedMin, GaussianOracle) {
  RngStream rng(59, 0);
  SolverOptions opts;
  opts.decoder = DecoderKind::kGaussian;
  auto [run, rep] = svp_shifted_min(LatticeBasis::identity(3), rng, opts);
  EXPECT_GE(run.alpha, kShiftedMinAlpha);
  EXPECT_GT(run.eps, 0);
  EXPECT_TRUE(run.success);
}

TEST(QuantumReport, Counts) {
  auto r = quantum_cost_report(10, 3, kShiftedMinAlpha, 0.0);
  EXPECT_EQ(r.classical_queries, 59049u);
  EXPECT_EQ(r.quantum_queries, 243u);
  EXPECT_EQ(quantum_query_count(3, 5), 16u);  // sqrt(243) = 15.59
  EXPECT_EQ(quantum_query_count(2, 7), 12u);  // sqrt(128) = 11.31
  for (int n = 1; n <= 30; ++n) {
    const auto q = quantum_query_count(3, n);
    const auto c = quantum_cost_report(n, 3, 0.3, 0.0).classical_queries;
    EXPECT_GE(q * q, c);
    EXPECT_LT((q - 1) * (q - 1), c);
  }
}

TEST(QuantumReport, ExponentSum) {
  const int n = 20;
  auto r = quantum_cost_report(n, 3, kShiftedMinAlpha, std::pow(2.0, -0.322 * n));
  EXPECT_NEAR(r.per_query_cost_exponent, 0.161, 1e-12);
  EXPECT_NEAR(r.exponent_sum(), n * (std::log2(3.0) / 2 + 0.161), 1e-9);
}

TEST(Caps, FindsLambda1InTwoDims) {
  RngStream rng(60, 0);
  auto b = LatticeBasis::from_integer_columns({{3, 1}, {1, 4}});
  auto run = svp_spherical_caps(b, kCapAlpha, 100, rng);
  EXPECT_TRUE(run.success);
  EXPECT_FALSE(run.levels.empty());
}

TEST(Caps, RandomLattices) {
  RngStream rng(61, 0);
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 2 + inst % 3;
    auto b = random_integer_basis(n, 4, rng);
    auto run = svp_spherical_caps(b, kCapAlpha, 60, rng);
    EXPECT_TRUE(run.success) << inst;
  }
}

TEST(Caps, RadiusPolicies) {
  EXPECT_DOUBLE_EQ(cap_radius(4, 0.4, 2.0, CapRadiusPolicy::kAlpha), 0.4 * 0.75 * 2.0);
  // sqrt(1 - 4 * 0.45^2) = 0.4359 < 0.45
  EXPECT_NEAR(cap_radius(4, 0.45, 2.0, CapRadiusPolicy::kOptimal),
              std::sqrt(1 - 4 * 0.45 * 0.45) * 0.75 * 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(cap_radius(4, 0.3, 2.0, CapRadiusPolicy::kOptimal), 0.3 * 0.75 * 2.0);
}

TEST(Caps, TargetsKeepPromise) {
  // Level radii never exceed alpha * lambda1 when d_i <= (1 + 1/n) lambda1.
  RngStream rng(62, 0);
  auto b = random_integer_basis(4, 4, rng);
  SolverOptions opts;
  opts.stop_on_success = false;
  auto run = svp_spherical_caps(b, kCapAlpha, 2, rng, opts);
  for (const auto& lv : run.levels) {
    if (lv.d <= (1 + 1.0 / 4) * run.lambda1_oracle) EXPECT_LE(lv.radius, kCapAlpha * run.lambda1_oracle);
  }
  EXPECT_EQ(run.levels.size(), 17u);
}

TEST(Caps, WorkerInvariant) {
  auto b = LatticeBasis::from_integer_columns({{3, 1, 0}, {1, 4, 1}, {0, 2, 5}});
  SolverOptions one, three;
  three.workers = 3;
  one.stop_on_success = three.stop_on_success = false;
  RngStream r1(63, 0), r3(63, 0);
  auto a = svp_spherical_caps(b, kCapAlpha, 8, r1, one);
  auto c = svp_spherical_caps(b, kCapAlpha, 8, r3, three);
  EXPECT_EQ(a.best, c.best);
  ASSERT_EQ(a.levels.size(), c.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i) EXPECT_EQ(a.levels[i].successes, c.levels[i].successes);
}

// Normalized cap mass of half-angle phi on S^{n-1}.
double cap_fraction(int n, double phi) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [n](double t) { return std::pow(std::sin(t), n - 2); };
  return gauss_kronrod<double, 61>::integrate(f, 0, phi) / gauss_kronrod<double, 61>::integrate(f, 0, kPi);
}

TEST(Caps, SuccessRateMatchesCapMass) {
  const int n = 4;
  auto b = LatticeBasis::identity(n);
  ExactBddDecoder dec(b, kCapAlpha);
  const double r = kCapAlpha * (1 - 1.0 / n);
  RngStream rng(64, 0);
  auto lv = cap_success_rate(dec, r, 2000, rng);
  const double cphi = (r * r + 1 - 4 * kCapAlpha * kCapAlpha) / (2 * r);
  // 2n shortest vectors.
  const double predicted = std::min(1.0, 2 * n * cap_fraction(n, std::acos(cphi)));
  const double rate = static_cast<double>(lv.successes) / lv.targets;
  EXPECT_GT(rate, predicted / 4);
  EXPECT_LT(rate, predicted * 4);
}

TEST(Sphere, OneDimension) {
  RngStream rng(65, 0);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    auto u = sample_unit_sphere(1, rng);
    ASSERT_EQ(std::abs(u[0]), 1.0);
    plus += u[0] > 0;
  }
  EXPECT_NEAR(plus, 5000, 4 * 50);
}

std::vector<std::uint64_t> angle_histogram(int n, int draws, int bins, RngStream& rng) {
  std::vector<std::uint64_t> h(bins, 0);
  for (int i = 0; i < draws; ++i) {
    auto u = sample_unit_sphere(n, rng);
    const double th = std::acos(std::clamp(u[0], -1.0, 1.0));
    ++h[std::min(bins - 1, static_cast<int>(th / kPi * bins))];
  }
  return h;
}

TEST(Sphere, ThreeDimCosineUniform) {
  RngStream rng(66, 0);
  const int bins = 40;
  std::vector<std::uint64_t> h(bins, 0);
  for (int i = 0; i < 1'000'000; ++i) {
    auto u = sample_unit_sphere(3, rng);
    ++h[std::min(bins - 1, static_cast<int>((u[0] + 1) / 2 * bins))];
  }
  EXPECT_TRUE(chi_square_gof(h, std::vector<double>(bins, 1.0 / bins)).passes());
}

TEST(Sphere, EightDimAngleDensity) {
  RngStream rng(67, 0);
  const int bins = 30, n = 8;
  auto h = angle_histogram(n, 200'000, bins, rng);
  std::vector<double> expected(bins);
  for (int k = 0; k < bins; ++k)
    expected[k] = cap_fraction(n, kPi * (k + 1) / bins) - cap_fraction(n, kPi * k / bins);
  EXPECT_TRUE(chi_square_gof(h, expected).passes());
}

TEST(ScaleEquivariance, SameDecisions) {
  RngStream base(68, 0);
  auto b = random_integer_basis(3, 4, base);
  auto b3 = b.scaled(Rational(3));
  RngStream r1(69, 0), r2(69, 0);
  auto [a, ra] = svp_shifted_min(b, r1);
  auto [c, rc] = svp_shifted_min(b3, r2);
  EXPECT_EQ(a.best, c.best);
  EXPECT_NEAR(c.best_norm, 3 * a.best_norm, 1e-9);
  RngStream r3(70, 0), r4(70, 0);
  auto x = svp_spherical_caps(b, kCapAlpha, 10, r3);
  auto y = svp_spherical_caps(b3, kCapAlpha, 10, r4);
  EXPECT_EQ(x.best, y.best);
  EXPECT_EQ(x.levels.size(), y.levels.size());
  EXPECT_NEAR(y.best_norm, 3 * x.best_norm, 1e-9);
}

}  // namespace
}  // namespace lbdd
