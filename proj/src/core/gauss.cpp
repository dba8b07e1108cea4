#include "core/gauss.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "core/errors.hpp"

namespace lbdd {

namespace {

constexpr double kPi = std::numbers::pi;
// Half-width of the 1-D rejection window in units of s; exp(-pi*t^2) ~ 1e-16.
constexpr double kWindow = 3.4;

}  // namespace

double rho(double sq_norm, double s) { return std::exp(-kPi * sq_norm / (s * s)); }

double tail_radius(double s, int n, double tau) {
  return s * std::sqrt(std::log(1.0 / tau) / kPi + n);
}

double rho_mass(const LatticeBasis& basis, std::span<const double> shift, double s, double radius,
                std::uint64_t node_budget) {
  LatticeEnumerator en(basis, node_budget);
  std::vector<double> terms;
  en.visit_within(shift, radius, [&](const IntVector&, double sqd) {
    if (sqd <= radius * radius) terms.push_back(rho(sqd, s));
  });
  // Sum small terms first.
  std::sort(terms.begin(), terms.end());
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

double rho_mass(const LatticeBasis& basis, std::span<const double> shift, double s) {
  return rho_mass(basis, shift, s, tail_radius(s, basis.rank()));
}

ExactSampler::ExactSampler(const LatticeBasis& basis, double s, std::span<const double> center,
                           std::uint64_t node_budget)
    : s_(s) {
  if (!(s > 0)) throw WidthTooSmall("gaussian width must be positive");
  const int n = basis.rank();
  std::vector<double> c(center.begin(), center.end());
  if (c.empty()) c.assign(n, 0.0);
  LatticeEnumerator en(basis, node_budget);
  const double radius = tail_radius(s, n);
  struct Entry {
    IntVector z;
    double w;
  };
  std::vector<Entry> entries;
  en.visit_within(c, radius, [&](const IntVector& z, double sqd) {
    if (sqd <= radius * radius) entries.push_back({z, rho(sqd, s)});
  });
  // Canonical order: heaviest first, then coefficients.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.w != b.w) return a.w > b.w;
    return a.z < b.z;
  });
  std::vector<double> small_first;
  small_first.reserve(entries.size());
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) small_first.push_back(it->w);
  mass_ = std::accumulate(small_first.begin(), small_first.end(), 0.0);
  support_.reserve(entries.size());
  probs_.reserve(entries.size());
  cdf_.reserve(entries.size());
  double acc = 0.0;
  for (auto& e : entries) {
    const double p = e.w / mass_;
    index_.emplace(LatticePoint{e.z}, support_.size());
    support_.push_back(LatticePoint{std::move(e.z)});
    probs_.push_back(p);
    acc += p;
    cdf_.push_back(acc);
  }
  if (!cdf_.empty()) cdf_.back() = 1.0;
}

std::size_t ExactSampler::sample_index(RngStream& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

LatticePoint ExactSampler::sample(RngStream& rng) const { return support_[sample_index(rng)]; }

double ExactSampler::probability(const LatticePoint& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? 0.0 : probs_[it->second];
}

LatticePoint exact_dgs_sample(const LatticeBasis& basis, double s, RngStream& rng) {
  return ExactSampler(basis, s).sample(rng);
}

std::int64_t sample_integer_gaussian(double s, double c, RngStream& rng) {
  const auto lo = static_cast<std::int64_t>(std::ceil(c - kWindow * s));
  const auto hi = static_cast<std::int64_t>(std::floor(c + kWindow * s));
  if (hi < lo) return static_cast<std::int64_t>(std::llround(c));
  for (;;) {
    const std::int64_t x = rng.uniform_int(lo, hi);
    const double d = static_cast<double>(x) - c;
    if (rng.uniform() < rho(d * d, s)) return x;
  }
}

KleinSampler::KleinSampler(const LatticeBasis& basis, double s)
    : basis_(basis), reduction_(lll_reduce(basis)), s_(s) {
  const double need = min_width(reduction_.basis);
  if (s < need) {
    throw WidthTooSmall("klein sampler needs s >= " + std::to_string(need) + ", got " +
                        std::to_string(s));
  }
}

double KleinSampler::min_width(const LatticeBasis& basis) {
  const int n = basis.rank();
  return basis.max_gso_norm() * std::sqrt(std::log(2.0 * n + 4.0) / kPi);
}

LatticePoint KleinSampler::sample(RngStream& rng) const {
  return sample(rng, std::vector<double>(basis_.rank(), 0.0));
}

LatticePoint KleinSampler::sample(RngStream& rng, std::span<const double> center) const {
  const auto& red = reduction_.basis;
  const auto& g = red.gso();
  const auto& cols = red.columns_double();
  const int n = red.rank();
  std::vector<double> c(center.begin(), center.end());
  IntVector z(n, 0);
  for (int i = n - 1; i >= 0; --i) {
    double dot = 0.0;
    for (int k = 0; k < n; ++k) dot += c[k] * g.vectors[i][k];
    const double ci = dot / g.sq_norms[i];
    const double si = s_ / std::sqrt(g.sq_norms[i]);
    z[i] = sample_integer_gaussian(si, ci, rng);
    for (int k = 0; k < n; ++k) c[k] -= static_cast<double>(z[i]) * cols[i][k];
  }
  IntVector out(n, 0);
  for (int j = 0; j < n; ++j) {
    std::int64_t acc = 0;
    for (int i = 0; i < n; ++i) acc += reduction_.transform[j][i] * z[i];
    out[j] = acc;
  }
  return LatticePoint{std::move(out)};
}

LatticePoint klein_sample(const LatticeBasis& basis, double s, RngStream& rng) {
  return KleinSampler(basis, s).sample(rng);
}

SmoothingEstimate smoothing_parameter(const LatticeBasis& basis, double eps,
                                      std::uint64_t node_budget) {
  if (!(eps > 1e-12 && eps < 0.999)) throw OutOfDomain("eps must lie in (1e-12, 0.999)");
  const int n = basis.rank();
  const auto dual = dual_basis(basis).lattice;
  LatticeEnumerator den(dual, node_budget);
  const double lam = den.lambda1();
  // sum_{w != 0} rho_{1/s}(w) >= 2 exp(-pi s^2 lam^2) > eps below this point.
  double s_lo = std::sqrt(std::log(2.0 / eps) / kPi) / lam * (1.0 - 1e-9);
  const double tau = std::min(kTailMass, eps * 1e-6);
  const double radius = tail_radius(1.0 / s_lo, n, tau);
  std::vector<double> sq;
  const std::vector<double> origin(n, 0.0);
  den.visit_within(origin, radius, [&](const IntVector& z, double sqd) {
    if (sqd <= radius * radius && std::any_of(z.begin(), z.end(), [](auto v) { return v != 0; }))
      sq.push_back(sqd);
  });
  std::sort(sq.begin(), sq.end(), std::greater<>());
  auto theta = [&](double s) {
    double acc = 0.0;
    for (double v : sq) acc += std::exp(-kPi * s * s * v);
    return acc;
  };
  double s_hi = s_lo;
  while (theta(s_hi) > eps) {
    s_lo = s_hi;
    s_hi *= 1.5;
  }
  while (s_hi - s_lo > 1e-7 * s_hi) {
    const double mid = 0.5 * (s_lo + s_hi);
    if (theta(mid) > eps) s_lo = mid;
    else s_hi = mid;
  }
  return SmoothingEstimate{eps, s_lo, s_hi, radius};
}

double smoothing_eps(const LatticeBasis& basis, double s, std::uint64_t node_budget) {
  const auto dual = dual_basis(basis).lattice;
  const std::vector<double> origin(basis.rank(), 0.0);
  const double w = 1.0 / s;
  return rho_mass(dual, origin, w, tail_radius(w, basis.rank()), node_budget) - 1.0;
}

double statistical_distance(std::span<const double> p, std::span<const double> q) {
  const std::size_t k = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    acc += std::fabs(a - b);
  }
  return 0.5 * acc;
}

GofResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected,
                         double min_expected) {
  if (observed.size() != expected.size() && observed.size() != expected.size() + 1)
    throw ConfigError("observed and expected category counts differ");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<std::pair<double, double>> cats;  // (expected count, observed)
  double covered = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    cats.emplace_back(expected[i] * total, static_cast<double>(observed[i]));
    covered += expected[i];
  }
  const double rest_obs = observed.size() > expected.size() ? observed.back() : 0.0;
  const double rest_exp = std::max(0.0, 1.0 - covered) * total;
  if (rest_exp > 0 || rest_obs > 0) cats.emplace_back(rest_exp, rest_obs);
  std::stable_sort(cats.begin(), cats.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> cur{0.0, 0.0};
  for (const auto& c : cats) {
    cur.first += c.first;
    cur.second += c.second;
    if (cur.first >= min_expected) {
      bins.push_back(cur);
      cur = {0.0, 0.0};
    }
  }
  if (cur.first > 0 || cur.second > 0) {
    if (bins.empty()) bins.push_back(cur);
    else {
      bins.back().first += cur.first;
      bins.back().second += cur.second;
    }
  }
  GofResult r;
  r.bins = static_cast<int>(bins.size());
  r.dof = r.bins - 1;
  for (const auto& [e, o] : bins) {
    if (e > 0) r.statistic += (o - e) * (o - e) / e;
    else if (o > 0) r.statistic = std::numeric_limits<double>::infinity();
  }
  if (r.dof <= 0) {
    r.p_value = 1.0;
    return r;
  }
  if (!std::isfinite(r.statistic)) {
    r.p_value = 0.0;
    return r;
  }
  boost::math::chi_squared_distribution<double> dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

GofResult chi_square_gof(std::span<const LatticePoint> samples, const ExactSampler& reference,
                         double min_expected) {
  const auto& support = reference.support();
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> index;
  for (std::size_t i = 0; i < support.size(); ++i) index.emplace(support[i], i);
  std::vector<std::uint64_t> observed(support.size() + 1, 0);
  for (const auto& p : samples) {
    auto it = index.find(p);
    ++observed[it == index.end() ? support.size() : it->second];
  }
  return chi_square_gof(observed, reference.probabilities(), min_expected);
}

double coset_distance_from_uniform(std::span<const LatticePoint> points, int n, std::int64_t q) {
  std::uint64_t classes = 1;
  for (int i = 0; i < n; ++i) classes *= static_cast<std::uint64_t>(q);
  std::vector<std::uint64_t> counts(classes, 0);
  for (const auto& p : points) ++counts[coset_label(p, q).index()];
  const double total = static_cast<double>(points.size());
  const double u = 1.0 / static_cast<double>(classes);
  double acc = 0.0;
  for (auto c : counts) acc += std::fabs(static_cast<double>(c) / total - u);
  return 0.5 * acc;
}

}  // namespace lbdd
