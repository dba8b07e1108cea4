#include "core/bdd.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <spdlog/spdlog.h>

#include "core/batch.hpp"
#include "core/dense.hpp"
#include "core/errors.hpp"
#include "core/gauss.hpp"

namespace lbdd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct EstimateWithGradient {
  double value = 0.0;
  // Gradient in dual-coefficient space: sum_j sin(2 pi u_j . xi) u_j.
  std::vector<double> dual_grad;
};

std::vector<double> frac(std::vector<double> xi) {
  for (auto& v : xi) v -= std::floor(v);
  return xi;
}

double estimate_frac(const BddOracle& o, const std::vector<double>& f) {
  const std::size_t n = f.size();
  const std::size_t k = o.multiplicity.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double* u = &o.unique_coeffs[j * n];
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += u[i] * f[i];
    acc += o.multiplicity[j] * std::cos(kTwoPi * dot);
  }
  return acc / static_cast<double>(o.m);
}

EstimateWithGradient estimate_with_gradient(const BddOracle& o, const std::vector<double>& f) {
  const std::size_t n = f.size();
  const std::size_t k = o.multiplicity.size();
  EstimateWithGradient r;
  r.dual_grad.assign(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double* u = &o.unique_coeffs[j * n];
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += u[i] * f[i];
    const double ph = kTwoPi * dot;
    r.value += o.multiplicity[j] * std::cos(ph);
    const double sn = o.multiplicity[j] * std::sin(ph);
    for (std::size_t i = 0; i < n; ++i) r.dual_grad[i] += sn * u[i];
  }
  r.value /= static_cast<double>(o.m);
  return r;
}

}  // namespace

void BddOracle::finalize() {
  enumerator = std::make_shared<const LatticeEnumerator>(basis);
  std::map<IntVector, std::uint64_t> counts;
  for (const auto& u : dual_coeffs) ++counts[u];
  unique_coeffs.clear();
  multiplicity.clear();
  for (const auto& [u, c] : counts) {
    for (auto v : u) unique_coeffs.push_back(static_cast<double>(v));
    multiplicity.push_back(static_cast<double>(c));
  }
}

LatticePoint exact_bdd(const LatticeBasis& basis, std::span<const double> target,
                       std::uint64_t node_budget) {
  return LatticeEnumerator(basis, node_budget).closest(target);
}

double bdd_alpha(double eps, double dual_eta, double lambda1, double slack) {
  const double r2 = std::log(1.0 / eps) / kPi - slack;
  if (r2 <= 0) return 0.0;
  return std::sqrt(r2) / (2.0 * dual_eta * lambda1);
}

std::uint64_t bdd_sample_count(int n, double eps, double c) {
  return static_cast<std::uint64_t>(std::ceil(c * n * std::log2(1.0 / eps) / std::sqrt(eps)));
}

namespace {

BddOracle oracle_header(const LatticeBasis& basis, double eps, const BddOptions& opts) {
  BddOracle o{basis};
  o.requested_eps = eps;
  o.eps = std::clamp(eps, opts.min_eps, opts.max_eps);
  if (o.eps != eps)
    spdlog::debug("bdd: eps {:.3g} clamped to {:.3g}", eps, o.eps);
  o.sample_constant = opts.sample_constant;
  o.conservative_slack = opts.conservative_slack;
  o.lambda1 = LatticeEnumerator(basis).lambda1();
  o.m = bdd_sample_count(basis.rank(), o.eps, opts.sample_constant);
  if (o.m > opts.max_samples)
    throw BudgetExceeded(fmt::format("bdd oracle needs {} samples (cap {})", o.m, opts.max_samples));
  return o;
}

void set_width(BddOracle& o, double width) {
  o.dual_width = width;
  o.alpha = bdd_alpha(o.eps, o.dual_width, o.lambda1, o.conservative_slack);
  o.phi = o.alpha * o.lambda1;
}

}  // namespace

BddOracle build_bdd_oracle(const LatticeBasis& basis, double eps, RngStream& rng,
                           const BddOptions& opts) {
  auto o = oracle_header(basis, eps, opts);
  const auto dual = dual_basis(basis).lattice;
  set_width(o, smoothing_parameter(dual, o.eps).s_hi);
  auto batch = sample_at_smoothing(dual, o.dual_width, o.m, rng);
  o.dual_coeffs.reserve(o.m);
  for (auto& p : batch.points) o.dual_coeffs.push_back(std::move(p.coeffs));
  o.finalize();
  spdlog::debug("bdd oracle: n={} eps={:.3g} alpha={:.4f} m={} distinct={} c={}", basis.rank(),
                o.eps, o.alpha, o.m, o.multiplicity.size(), o.sample_constant);
  return o;
}

BddOracle oracle_from_samples(const LatticeBasis& basis, double eps, double dual_width,
                              std::vector<IntVector> dual_coeffs, const BddOptions& opts) {
  auto o = oracle_header(basis, eps, opts);
  if (dual_coeffs.size() < o.m)
    throw InsufficientInput(fmt::format("oracle needs {} dual samples, got {}", o.m, dual_coeffs.size()));
  dual_coeffs.resize(o.m);
  set_width(o, dual_width);
  o.dual_coeffs = std::move(dual_coeffs);
  o.finalize();
  return o;
}

double eps_for_alpha(const LatticeBasis& basis, double target_alpha, const BddOptions& opts) {
  const auto dual = dual_basis(basis).lattice;
  const double lam = LatticeEnumerator(basis).lambda1();
  double eps = opts.max_eps;
  for (;;) {
    const double a = bdd_alpha(eps, smoothing_parameter(dual, eps).s_hi, lam, opts.conservative_slack);
    if (a >= target_alpha || eps / 2 < opts.min_eps) return eps;
    eps /= 2;
  }
}

double periodic_gaussian_estimate(const BddOracle& oracle, const RationalVector& x) {
  auto xi = oracle.basis.coordinates_exact(x);
  std::vector<double> f(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), xi[i].get_num_mpz_t(), xi[i].get_den_mpz_t());
    f[i] = Rational(xi[i] - fl).get_d();
  }
  return estimate_frac(oracle, f);
}

double periodic_gaussian_estimate(const BddOracle& oracle, std::span<const double> x) {
  return estimate_frac(oracle, frac(oracle.basis.coordinates(x)));
}

LatticePoint bdd_decode(const BddOracle& oracle, std::span<const double> target,
                        BddQueryReport* report) {
  BddQueryReport rep;
  const auto& en = *oracle.enumerator;
  const int n = oracle.basis.rank();
  std::vector<double> t(target.begin(), target.end());

  auto snap = en.babai(t);
  if (en.exact_sq_distance(snap, t) == 0) {
    rep.converged = true;
    if (report) *report = rep;
    return snap;
  }

  const auto& dual_rows = oracle.basis.inverse_rows_double();
  std::vector<double> x = t;
  auto cur = estimate_with_gradient(oracle, frac(oracle.basis.coordinates(x)));
  ++rep.estimator_calls;
  const double h0 = 0.1 / oracle.dual_width;
  const double h_min = 1e-3 * h0;
  double h = h0;
  while (!rep.converged) {
    if (rep.ascent_steps >= static_cast<std::uint64_t>(kAscentBudget)) {
      if (report) *report = rep;
      throw NotConverged(fmt::format("bdd ascent exceeded {} steps", kAscentBudget));
    }
    ++rep.ascent_steps;
    // Ascent direction -sum_j sin(.) w_j, with w_j = sum_i u_ji b*_i.
    std::vector<double> dir(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) dir[k] -= cur.dual_grad[i] * dual_rows[i][k];
    const double norm = std::sqrt(sq_norm(dir));
    if (norm == 0.0) {
      rep.converged = true;
      break;
    }
    std::vector<double> y(n);
    for (int k = 0; k < n; ++k) y[k] = x[k] + h * dir[k] / norm;
    auto next = estimate_with_gradient(oracle, frac(oracle.basis.coordinates(y)));
    ++rep.estimator_calls;
    if (next.value > cur.value) {
      x = std::move(y);
      cur = std::move(next);
    } else {
      h *= 0.5;
      if (h < h_min) rep.converged = true;
    }
  }
  auto out = en.babai(x);
  rep.residual = std::sqrt(en.exact_sq_distance(out, t).get_d());
  if (report) *report = rep;
  return out;
}

void save_oracle(const std::string& path, const BddOracle& o) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << fmt::format("BDD {} {} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n",
                     o.basis.rank(), o.m, o.eps, o.requested_eps, o.alpha, o.phi, o.lambda1,
                     o.sample_constant, o.conservative_slack, o.dual_width);
  out << format_basis(o.basis);
  GaussianBatch b;
  b.n = o.basis.rank();
  b.width = o.dual_width;
  b.config = {"dual samples, coefficients in the dual basis"};
  for (const auto& u : o.dual_coeffs) b.points.push_back(LatticePoint{u});
  write_batch(out, b);
  if (!out) throw IoError("write failed: " + path);
}

BddOracle load_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty oracle file");
  std::istringstream hs(line);
  std::string tag;
  int n = 0;
  std::uint64_t m = 0;
  double eps, req, alpha, phi, lam, c, slack, width;
  hs >> tag >> n >> m >> eps >> req >> alpha >> phi >> lam >> c >> slack >> width;
  if (tag != "BDD" || hs.fail() || n <= 0) throw ParseError("bad oracle header: " + line);
  std::string basis_text;
  int rows = 0;
  while (rows < n + 1 && std::getline(in, line)) {
    basis_text += line + '\n';
    auto pos = line.find_first_not_of(" \t");
    if (pos != std::string::npos && line[pos] != '#') ++rows;
  }
  BddOracle o{parse_basis(basis_text)};
  o.m = m;
  o.eps = eps;
  o.requested_eps = req;
  o.alpha = alpha;
  o.phi = phi;
  o.lambda1 = lam;
  o.sample_constant = c;
  o.conservative_slack = slack;
  o.dual_width = width;
  auto batch = read_batch(in);
  if (batch.size() != m || batch.n != n) throw ParseError("oracle sample count mismatch");
  for (auto& p : batch.points) o.dual_coeffs.push_back(std::move(p.coeffs));
  o.finalize();
  return o;
}

ExactBddDecoder::ExactBddDecoder(const LatticeBasis& basis, double alpha, std::uint64_t node_budget)
    : en_(basis, node_budget), alpha_(alpha), lambda1_(en_.lambda1()) {}

std::optional<LatticePoint> ExactBddDecoder::decode(std::span<const double> target) const {
  // Slight inflation so points exactly at the boundary are still decoded.
  return en_.closest_within(target, alpha_ * lambda1_ * (1.0 + 1e-9));
}

std::optional<LatticePoint> GaussianBddDecoder::decode(std::span<const double> target) const {
  try {
    return bdd_decode(*oracle_, target);
  } catch (const NotConverged&) {
    return std::nullopt;
  }
}

}  // namespace lbdd
