#include "core/svp.hpp"

#include <cmath>
#include <fmt/format.h>
#include <set>
#include <spdlog/spdlog.h>

#include "core/combiner.hpp"
#include "core/errors.hpp"
#include "core/gauss.hpp"
#include "core/parallel.hpp"

namespace lbdd {

std::uint64_t EnumerationGrid::size() const {
  std::uint64_t out = 1;
  for (int i = 0; i < rank(); ++i) {
    if (out > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(p))
      throw BudgetExceeded(fmt::format("grid {}^{} too large", p, rank()));
    out *= static_cast<std::uint64_t>(p);
  }
  return out;
}

IntVector EnumerationGrid::point(std::uint64_t index) const {
  const int n = rank();
  IntVector s(n);
  for (int i = n - 1; i >= 0; --i) {
    s[i] = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(p));
    index /= static_cast<std::uint64_t>(p);
  }
  return s;
}

std::optional<LatticePoint> EnumerationGrid::yield(const IntVector& s) const {
  const auto& b = decoder->basis();
  auto x = b.embed_double(s);
  const double pd = static_cast<double>(p);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (x[k] - (target.empty() ? 0.0 : target[k])) / pd;
  auto z = decoder->decode(x);
  if (!z) return std::nullopt;
  LatticePoint out{s};
  for (std::size_t k = 0; k < s.size(); ++k) out.coeffs[k] -= p * z->coeffs[k];
  return out;
}

void enumerate_via_bdd(const EnumerationGrid& grid,
                       const std::function<void(std::uint64_t, const IntVector&,
                                                const std::optional<LatticePoint>&)>& visit) {
  const std::uint64_t total = grid.size();
  std::uint64_t declined = 0;
  for (std::uint64_t i = 0; i < total; ++i) {
    auto s = grid.point(i);
    auto y = grid.yield(s);
    if (!y) ++declined;
    visit(i, s, y);
  }
  if (declined) spdlog::debug("enumerate_via_bdd: decoder declined {} of {} points", declined, total);
}

std::vector<LatticePoint> enumeration_yield_set(const EnumerationGrid& grid, int workers) {
  using Set = std::set<LatticePoint>;
  auto set = parallel_reduce(
      grid.size(), workers, Set{},
      [&](Set& acc, std::uint64_t i) {
        if (auto y = grid.yield(grid.point(i))) acc.insert(std::move(*y));
      },
      [](Set& a, Set&& b) { a.merge(b); });
  return {set.begin(), set.end()};
}

namespace {

// Running minimum over yields. Keys are norms; near-ties are settled with
// exact squared norms, then lexicographically.
struct Candidate {
  double key = 0.0;
  LatticePoint point;
  bool is_zero = false;
};

bool better(const LatticeBasis& b, const Candidate& x, const Candidate& y) {
  const double scale = std::max(x.key, y.key);
  if (std::abs(x.key - y.key) > 1e-9 * scale) return x.key < y.key;
  if (!x.is_zero && !y.is_zero) {
    const auto nx = sq_norm_exact(b.embed(x.point.coeffs));
    const auto ny = sq_norm_exact(b.embed(y.point.coeffs));
    if (nx != ny) return nx < ny;
  } else if (x.is_zero != y.is_zero) {
    return y.is_zero;
  }
  return x.point < y.point;
}

struct SearchAcc {
  std::optional<Candidate> best;
  std::uint64_t queries = 0;
  std::uint64_t seen = 0;
  std::uint64_t declined = 0;
  std::uint64_t target_successes = 0;
};

void offer(const LatticeBasis& b, SearchAcc& acc, Candidate c) {
  if (!acc.best || better(b, c, *acc.best)) acc.best = std::move(c);
}

void merge_acc(const LatticeBasis& b, SearchAcc& a, SearchAcc&& o) {
  a.queries += o.queries;
  a.seen += o.seen;
  a.declined += o.declined;
  a.target_successes += o.target_successes;
  if (o.best) offer(b, a, std::move(*o.best));
}

bool has_norm_sq(const LatticeBasis& b, const LatticePoint& p, double lambda1, const Rational& l2) {
  const double norm = std::sqrt(sq_norm(b.embed_double(p.coeffs)));
  if (std::abs(norm - lambda1) > 1e-7 * lambda1) return false;
  return sq_norm_exact(b.embed(p.coeffs)) == l2;
}

// Grid point i folded into acc; the zero yield is skipped unless
// zero_key > 0, in which case it competes with that key.
void visit_grid_point(const EnumerationGrid& grid, std::uint64_t i, SearchAcc& acc,
                      double zero_key = 0.0) {
  const auto& b = grid.decoder->basis();
  ++acc.queries;
  auto y = grid.yield(grid.point(i));
  if (!y) {
    ++acc.declined;
    return;
  }
  ++acc.seen;
  if (y->is_zero()) {
    if (zero_key > 0) offer(b, acc, Candidate{zero_key, std::move(*y), true});
    return;
  }
  const double norm = std::sqrt(sq_norm(b.embed_double(y->coeffs)));
  offer(b, acc, Candidate{norm, std::move(*y), false});
}

struct DecoderSetup {
  std::unique_ptr<BddDecoder> decoder;
  double eps = 0.0;
};

DecoderSetup make_decoder(const LatticeBasis& basis, double alpha, RngStream& rng,
                          const SolverOptions& opts) {
  DecoderSetup out;
  if (opts.decoder == DecoderKind::kExact) {
    out.decoder = std::make_unique<ExactBddDecoder>(basis, alpha, opts.node_budget);
    return out;
  }
  const double eps = eps_for_alpha(basis, alpha, opts.bdd);
  auto rs = rng.split(0x0dac1e);
  auto oracle = std::make_shared<const BddOracle>(build_bdd_oracle(basis, eps, rs, opts.bdd));
  out.eps = oracle->eps;
  if (oracle->alpha < alpha)
    spdlog::info("svp: Gaussian oracle reaches alpha = {:.4f} < {:.4f} (eps = {:.3g})",
                 oracle->alpha, alpha, oracle->eps);
  out.decoder = std::make_unique<GaussianBddDecoder>(std::move(oracle));
  return out;
}

void finish(const LatticeBasis& basis, SolverRun& run, SearchAcc& acc) {
  LatticeEnumerator en(basis);
  run.lambda1_oracle = en.lambda1();
  run.queries_made = acc.queries;
  run.candidates_seen = acc.seen;
  run.declined = acc.declined;
  const bool fallback = !acc.best || acc.best->is_zero;
  if (fallback) {
    spdlog::warn("svp: no nonzero yield; falling back to the first basis vector");
    IntVector e1(basis.rank(), 0);
    e1[0] = 1;
    run.best = LatticePoint{e1};
  } else {
    run.best = acc.best->point;
  }
  run.best_norm = std::sqrt(sq_norm(basis.embed_double(run.best.coeffs)));
  // The fallback is not a solver output even when e1 happens to be shortest.
  run.success = !fallback && sq_norm_exact(basis.embed(run.best.coeffs)) == en.lambda1_squared();
}

}  // namespace

double QuantumCostReport::exponent_sum() const {
  return n * (std::log2(static_cast<double>(p)) / 2.0 + per_query_cost_exponent);
}

std::uint64_t quantum_query_count(std::int64_t p, int n) {
  mpz_class pn;
  mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
  mpz_class root, rem;
  mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), pn.get_mpz_t());
  if (rem != 0) ++root;
  if (!root.fits_ulong_p()) throw BudgetExceeded("quantum query count overflows");
  return root.get_ui();
}

QuantumCostReport quantum_cost_report(int n, std::int64_t p, double alpha, double eps) {
  QuantumCostReport r;
  r.n = n;
  r.p = p;
  r.alpha = alpha;
  r.eps = eps;
  mpz_class pn;
  mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
  r.classical_queries = pn.fits_ulong_p() ? pn.get_ui() : UINT64_MAX;
  r.quantum_queries = quantum_query_count(p, n);
  r.per_query_cost_exponent = eps > 0 ? std::log2(1.0 / eps) / (2.0 * n) : 0.0;
  return r;
}

BddOracle build_bdd_oracle_via_pipeline(const LatticeBasis& basis, double eps, std::int64_t q,
                                        RngStream& rng, const BddOptions& opts) {
  const auto dual = dual_basis(basis).lattice;
  const double e = std::clamp(eps, opts.min_eps, opts.max_eps);
  // The pipeline also needs its own eps; sample at the wider of the two widths.
  auto cfg = make_pipeline_config(dual, q, smoothing_parameter(dual, e).s_hi);
  cfg.s = std::max(cfg.s, smoothing_parameter(dual, cfg.eps).s_hi);
  cfg = make_pipeline_config(dual, q, cfg.s);
  const auto m = bdd_sample_count(basis.rank(), e, opts.sample_constant);
  if (m > opts.max_samples)
    throw BudgetExceeded(fmt::format("bdd oracle needs {} samples (cap {})", m, opts.max_samples));
  auto res = dgs_pipeline(dual, cfg, m, rng);
  std::vector<IntVector> coeffs;
  coeffs.reserve(m);
  for (auto& p : res.batch.points) coeffs.push_back(std::move(p.coeffs));
  spdlog::debug("pipeline oracle: width {:.4f}, {} Klein samples, {} combine calls", cfg.s,
                res.stats.klein_samples, res.stats.combine_calls);
  return oracle_from_samples(basis, e, cfg.s, std::move(coeffs), opts);
}

SolverRun svp_tradeoff(const LatticeBasis& basis, std::int64_t q, RngStream& rng,
                       const SolverOptions& opts) {
  if (q < 4) throw ConfigError("tradeoff solver needs q >= 4");
  const int n = basis.rank();
  const double alpha = 0.1 / static_cast<double>(q);
  SolverRun run;
  run.seed = rng.seed();
  run.p = 10 * q;
  run.alpha = alpha;

  DecoderSetup dec;
  if (opts.decoder == DecoderKind::kExact) {
    dec = make_decoder(basis, alpha, rng, opts);
  } else {
    auto rs = rng.split(0x0dac1e);
    auto oracle = std::make_shared<const BddOracle>(
        build_bdd_oracle_via_pipeline(basis, eps_for_alpha(basis, alpha, opts.bdd), q, rs, opts.bdd));
    dec.eps = oracle->eps;
    run.alpha = oracle->alpha;
    dec.decoder = std::make_unique<GaussianBddDecoder>(std::move(oracle));
  }
  run.eps = dec.eps;
  EnumerationGrid grid{run.p, std::vector<double>(n, 0.0), dec.decoder.get()};

  SearchAcc acc;
  if (n <= opts.full_grid_max_n) {
    acc = parallel_reduce(
        grid.size(), opts.workers, SearchAcc{},
        [&](SearchAcc& a, std::uint64_t i) { visit_grid_point(grid, i, a); },
        [&](SearchAcc& a, SearchAcc&& o) { merge_acc(basis, a, std::move(o)); });
  } else {
    run.certifying = false;
    spdlog::info("svp tradeoff: n = {} > {}, sub-sampling {} grid points (non-certifying)", n,
                 opts.full_grid_max_n, opts.subsample_queries);
    acc = parallel_reduce(
        opts.subsample_queries, opts.workers, SearchAcc{},
        [&](SearchAcc& a, std::uint64_t i) {
          auto rs = rng.split(i);
          std::uint64_t idx = 0;
          for (int k = 0; k < n; ++k)
            idx = idx * static_cast<std::uint64_t>(run.p) +
                  static_cast<std::uint64_t>(rs.uniform_int(0, run.p - 1));
          visit_grid_point(grid, idx, a);
        },
        [&](SearchAcc& a, SearchAcc&& o) { merge_acc(basis, a, std::move(o)); });
  }
  finish(basis, run, acc);
  return run;
}

std::pair<SolverRun, QuantumCostReport> svp_shifted_min(const LatticeBasis& basis, RngStream& rng,
                                                        const SolverOptions& opts) {
  const int n = basis.rank();
  SolverRun run;
  run.seed = rng.seed();
  run.p = 3;
  auto dec = make_decoder(basis, kShiftedMinAlpha, rng, opts);
  run.alpha = dec.decoder->alpha();
  run.eps = dec.eps;
  EnumerationGrid grid{3, std::vector<double>(n, 0.0), dec.decoder.get()};
  const double sentinel = std::sqrt(sq_norm(basis.columns_double()[0])) + 1.0;
  auto acc = parallel_reduce(
      grid.size(), opts.workers, SearchAcc{},
      [&](SearchAcc& a, std::uint64_t i) { visit_grid_point(grid, i, a, sentinel); },
      [&](SearchAcc& a, SearchAcc&& o) { merge_acc(basis, a, std::move(o)); });
  finish(basis, run, acc);
  return {run, quantum_cost_report(n, 3, run.alpha, run.eps)};
}

double cap_radius(int n, double alpha, double d, CapRadiusPolicy policy) {
  double r = alpha;
  if (policy == CapRadiusPolicy::kOptimal) r = std::min(alpha, std::sqrt(std::max(0.0, 1.0 - 4.0 * alpha * alpha)));
  return r * (1.0 - 1.0 / n) * d;
}

namespace {

// One sphere target: p = 2 enumeration around radius * u.
void run_cap_target(const EnumerationGrid& base, double radius, RngStream rs, SearchAcc& acc,
                    double lambda1, const Rational& l2) {
  const auto& b = base.decoder->basis();
  auto u = sample_unit_sphere(b.rank(), rs);
  EnumerationGrid grid = base;
  for (auto& x : u) x *= radius;
  grid.target = std::move(u);
  SearchAcc local;
  bool hit = false;
  for (std::uint64_t i = 0, total = grid.size(); i < total; ++i) {
    visit_grid_point(grid, i, local);
  }
  if (local.best && !local.best->is_zero) hit = has_norm_sq(b, local.best->point, lambda1, l2);
  local.target_successes = hit ? 1 : 0;
  merge_acc(b, acc, std::move(local));
}

}  // namespace

CapLevel cap_success_rate(const BddDecoder& decoder, double radius, std::uint64_t targets,
                          RngStream& rng, int workers) {
  LatticeEnumerator en(decoder.basis());
  const double lam = en.lambda1();
  const Rational l2 = en.lambda1_squared();
  EnumerationGrid grid{2, {}, &decoder};
  auto acc = parallel_reduce(
      targets, workers, SearchAcc{},
      [&](SearchAcc& a, std::uint64_t j) { run_cap_target(grid, radius, rng.split(j), a, lam, l2); },
      [&](SearchAcc& a, SearchAcc&& o) { merge_acc(decoder.basis(), a, std::move(o)); });
  return CapLevel{0.0, radius, targets, acc.target_successes};
}

SolverRun svp_spherical_caps(const LatticeBasis& basis, double alpha, std::uint64_t budget,
                             RngStream& rng, const SolverOptions& opts) {
  if (!(alpha > 0 && alpha < 0.5)) throw OutOfDomain("cap solver needs alpha in (0, 1/2)");
  const int n = basis.rank();
  SolverRun run;
  run.seed = rng.seed();
  run.p = 2;
  auto dec = make_decoder(basis, alpha, rng, opts);
  run.alpha = dec.decoder->alpha();
  run.eps = dec.eps;
  LatticeEnumerator en(basis);
  const double lam = en.lambda1();
  const Rational l2 = en.lambda1_squared();
  const double d = std::sqrt(sq_norm(lll_reduce(basis).basis.columns_double()[0]));
  EnumerationGrid grid{2, {}, dec.decoder.get()};

  SearchAcc total;
  for (int i = 0; i <= n * n; ++i) {
    const double di = d / std::pow(1.0 + 1.0 / n, i);
    const double radius = cap_radius(n, run.alpha, di, opts.cap_policy);
    auto level_rng = rng.split(static_cast<std::uint64_t>(i));
    auto acc = parallel_reduce(
        budget, opts.workers, SearchAcc{},
        [&](SearchAcc& a, std::uint64_t j) {
          run_cap_target(grid, radius, level_rng.split(j), a, lam, l2);
        },
        [&](SearchAcc& a, SearchAcc&& o) { merge_acc(basis, a, std::move(o)); });
    run.levels.push_back(CapLevel{di, radius, budget, acc.target_successes});
    merge_acc(basis, total, std::move(acc));
    if (opts.stop_on_success && total.best && has_norm_sq(basis, total.best->point, lam, l2)) break;
  }
  finish(basis, run, total);
  return run;
}

std::vector<double> sample_unit_sphere(int n, RngStream& rng) {
  if (n < 1) throw OutOfDomain("sphere dimension must be >= 1");
  std::vector<double> v(n);
  for (;;) {
    for (auto& x : v) x = rng.normal();
    const double norm = std::sqrt(sq_norm(v));
    if (norm > 1e-300) {
      for (auto& x : v) x /= norm;
      return v;
    }
  }
}

}  // namespace lbdd
