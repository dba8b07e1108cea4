#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "core/batch.hpp"
#include "core/errors.hpp"
#include "core/gauss.hpp"

namespace lbdd {
namespace {

constexpr double kPi = std::numbers::pi;

// Theta series of Z at width s, summed directly.
double theta_z(double s) {
  double acc = 1.0;
  for (int k = 1; k < 50; ++k) acc += 2.0 * std::exp(-kPi * k * k / (s * s));
  return acc;
}

TEST(RhoMass, IntegersUnitWidth) {
  auto z1 = LatticeBasis::identity(1);
  std::vector<double> zero = {0.0};
  EXPECT_NEAR(rho_mass(z1, zero, 1.0), theta_z(1.0), 1e-12);
  EXPECT_NEAR(rho_mass(z1, zero, 1.0), 1.08643481, 1e-8);
}

TEST(RhoMass, LargeWidthScaling) {
  auto b = LatticeBasis::from_integer_columns({{2, 1}, {0, 3}});
  std::vector<double> zero = {0.0, 0.0};
  const double s = 30.0;
  const double mass = rho_mass(b, zero, s, 10 * s * std::sqrt(2.0));
  const double poisson = s * s / b.abs_determinant().get_d();
  EXPECT_NEAR(mass / poisson, 1.0, 0.01);
}

TEST(RhoMass, LatticeShiftInvariant) {
  auto b = LatticeBasis::from_integer_columns({{2, 1}, {0, 3}});
  std::vector<double> zero = {0.0, 0.0};
  auto v = b.embed_double(IntVector{3, -2});
  EXPECT_NEAR(rho_mass(b, v, 2.5), rho_mass(b, zero, 2.5), 1e-12);
}

TEST(ExactSampler, ZeroProbability) {
  ExactSampler s(LatticeBasis::identity(1), 1.0);
  EXPECT_NEAR(s.probability(LatticePoint{{0}}), 1.0 / theta_z(1.0), 1e-12);
  EXPECT_NEAR(s.probability(LatticePoint{{0}}), 0.920442, 1e-6);
}

TEST(ExactSampler, Symmetric) {
  ExactSampler s(LatticeBasis::identity(1), 1.5);
  RngStream rng(1, 0);
  std::map<int64_t, int> counts;
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) ++counts[s.sample(rng).coeffs[0]];
  for (int64_t z = 1; z <= 3; ++z) {
    const double p = s.probability(LatticePoint{{z}});
    const double sigma = std::sqrt(2 * draws * p * (1 - p));
    EXPECT_LE(std::abs(counts[z] - counts[-z]), 3 * sigma) << z;
  }
}

TEST(ExactSampler, GofAgainstTable) {
  auto b = LatticeBasis::identity(2);
  ExactSampler s(b, 2.0);
  RngStream rng(2, 0);
  std::vector<LatticePoint> pts;
  for (int i = 0; i < 100'000; ++i) pts.push_back(s.sample(rng));
  // Reference table built independently from rho_mass.
  std::vector<double> zero = {0.0, 0.0};
  const double mass = rho_mass(b, zero, 2.0);
  EXPECT_NEAR(s.total_mass(), mass, 1e-12);
  EXPECT_NEAR(s.probability(LatticePoint{{1, 1}}), rho(2.0, 2.0) / mass, 1e-14);
  EXPECT_TRUE(chi_square_gof(pts, s).passes());
}

TEST(Klein, MarginalMatchesExact) {
  auto b = LatticeBasis::identity(3);
  KleinSampler k(b, 10.0);
  ExactSampler ref(LatticeBasis::identity(1), 10.0);
  RngStream rng(3, 0);
  std::map<int64_t, double> emp;
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) emp[k.sample(rng).coeffs[0]] += 1.0 / draws;
  double sd = 0.0;
  for (std::size_t i = 0; i < ref.support().size(); ++i) {
    const auto z = ref.support()[i].coeffs[0];
    sd += std::abs(emp[z] - ref.probabilities()[i]);
    emp.erase(z);
  }
  for (auto& [z, p] : emp) sd += p;
  EXPECT_LT(0.5 * sd, 0.01);
}

TEST(Klein, Moments) {
  RngStream rng(4, 0);
  auto b = lll_reduce(random_integer_basis(6, 5, rng)).basis;
  const double s = 100 * b.max_gso_norm();
  KleinSampler k(b, s);
  const int draws = 20'000;
  const int n = 6;
  std::vector<double> mean(n, 0.0);
  std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
  for (int t = 0; t < draws; ++t) {
    auto x = b.embed_double(k.sample(rng).coeffs);
    for (int i = 0; i < n; ++i) {
      mean[i] += x[i];
      for (int j = 0; j < n; ++j) cov[i][j] += x[i] * x[j];
    }
  }
  const double var = s * s / (2 * kPi);
  for (int i = 0; i < n; ++i) {
    mean[i] /= draws;
    EXPECT_LT(std::abs(mean[i]), 3 * std::sqrt(var / draws));
    for (int j = 0; j < n; ++j) {
      const double c = cov[i][j] / draws;
      EXPECT_NEAR(c, i == j ? var : 0.0, 0.05 * var);
    }
  }
}

TEST(Klein, WidthTooSmall) {
  auto b = LatticeBasis::identity(3);
  EXPECT_THROW(KleinSampler(b, 0.5), WidthTooSmall);
}

// eta_eps(Z) by bisection on 2 sum_k exp(-pi s^2 k^2) = eps.
double eta_z(double eps) {
  double lo = 0.01, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double t = 0.0;
    for (int k = 1; k < 50; ++k) t += 2.0 * std::exp(-kPi * mid * mid * k * k);
    (t > eps ? lo : hi) = mid;
  }
  return hi;
}

TEST(Smoothing, IntegersHalf) {
  auto est = smoothing_parameter(LatticeBasis::identity(1), 0.5);
  EXPECT_LE(est.s_lo, eta_z(0.5) + 1e-9);
  EXPECT_GE(est.s_hi, eta_z(0.5) - 1e-9);
  EXPECT_LE(est.s_hi - est.s_lo, 1e-6 * est.s_hi);
  // Two-term series 2e^{-pi s^2} + 2e^{-4 pi s^2} = 1/2 has its root at 0.66783;
  // dropping the second term would give 0.66428.
  EXPECT_NEAR(est.value(), 0.667830, 1e-6);
}

TEST(Smoothing, Homogeneous) {
  auto b = LatticeBasis::from_integer_columns({{2, 1}, {1, 3}});
  auto e1 = smoothing_parameter(b, 0.1);
  auto e3 = smoothing_parameter(b.scaled(3), 0.1);
  EXPECT_NEAR(e3.value(), 3 * e1.value(), 3e-6 * e3.value());
}

TEST(Smoothing, MonotoneInEps) {
  auto b = LatticeBasis::from_integer_columns({{2, 1}, {1, 3}});
  EXPECT_GT(smoothing_parameter(b, 0.01).s_lo, smoothing_parameter(b, 0.1).s_hi);
}

TEST(Smoothing, ScaledEtaBound) {
  RngStream rng(5, 0);
  for (int t = 0; t < 20; ++t) {
    auto b = random_integer_basis(2 + t % 3, 4, rng);
    for (double eps : {0.5, 0.1}) {
      const double eta = smoothing_parameter(b, eps).s_hi;
      for (int k : {2, 3}) {
        const double tight = smoothing_parameter(b, std::pow(eps, k * k)).s_lo;
        EXPECT_GT(k * eta, tight);
      }
    }
  }
}

TEST(Smoothing, DualLambdaBound) {
  RngStream rng(6, 0);
  for (int t = 0; t < 20; ++t) {
    auto b = random_integer_basis(2 + t % 4, 4, rng);
    auto dual = dual_basis(b).lattice;
    const double lam = LatticeEnumerator(b).lambda1();
    for (double eps : {0.1, 0.01}) {
      const double eta_dual = smoothing_parameter(dual, eps).s_lo;
      EXPECT_LT(std::sqrt(std::log(1 / eps) / kPi), lam * eta_dual);
    }
  }
}

TEST(Smoothing, CosetMassRatio) {
  RngStream rng(7, 0);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 2;
    auto b = random_integer_basis(n, 3, rng);
    const double eps = 0.1;
    const double s = smoothing_parameter(b, eps).s_hi;
    std::vector<double> c(n), zero(n, 0.0);
    for (auto& v : c) v = rng.uniform() * 5 - 2.5;
    const double ratio = rho_mass(b, c, s) / rho_mass(b, zero, s);
    EXPECT_GE(ratio, (1 - eps) / (1 + eps));
    EXPECT_LE(ratio, 1.0 + 1e-12);
  }
}

TEST(StatisticalDistance, Examples) {
  std::vector<double> p = {0.6, 0.4}, q = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(statistical_distance(p, p), 0.0);
  EXPECT_NEAR(statistical_distance(p, q), 0.1, 1e-15);
  std::vector<double> a = {1, 0}, b = {0, 1};
  EXPECT_DOUBLE_EQ(statistical_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(statistical_distance(p, q), statistical_distance(q, p));
}

TEST(Gof, MergesSparseBins) {
  std::vector<std::uint64_t> obs = {50, 47, 2, 1};
  std::vector<double> exp = {0.5, 0.47, 0.02, 0.01};
  auto r = chi_square_gof(obs, exp);
  EXPECT_EQ(r.bins, 2);
  EXPECT_TRUE(r.passes());
  std::vector<std::uint64_t> bad = {90, 10, 0, 0};
  EXPECT_FALSE(chi_square_gof(bad, exp).passes());
}

TEST(Coset, UniformityAboveSmoothing) {
  auto b = LatticeBasis::identity(2);
  const std::int64_t q = 2;
  const double eps = 0.1;
  const double s = smoothing_parameter(b.scaled(q), eps).s_hi;
  ExactSampler sampler(b, s);
  RngStream rng(8, 0);
  std::vector<LatticePoint> pts;
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) pts.push_back(sampler.sample(rng));
  EXPECT_LE(coset_distance_from_uniform(pts, 2, q), 2 * eps + 3 * std::sqrt(4.0 / draws));
}

TEST(Batch, TextRoundTrip) {
  GaussianBatch b;
  b.n = 2;
  b.width = 1.25;
  b.stream_id = 9;
  b.claimed_closeness = 1e-3;
  b.config = {"cmd=sample seed=1"};
  b.points = {LatticePoint{{1, -2}}, LatticePoint{{0, 7}}};
  std::stringstream ss;
  write_batch(ss, b);
  auto r = read_batch(ss);
  EXPECT_EQ(r.points, b.points);
  EXPECT_EQ(r.width, b.width);
  EXPECT_EQ(r.stream_id, 9u);
  EXPECT_EQ(r.config, b.config);
  std::stringstream bad("DGS 2 0 1.0 0 3 0\n1 2\n");
  EXPECT_THROW(read_batch(bad), ParseError);
}

}  // namespace
}  // namespace lbdd
