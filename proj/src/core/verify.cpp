#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include "core/bdd.hpp"
#include "core/combiner.hpp"
#include "core/cost.hpp"
#include "core/dense.hpp"
#include "core/errors.hpp"
#include "core/gauss.hpp"
#include "core/parallel.hpp"
#include "core/svp.hpp"

namespace lbdd {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Verdict timed(const char* suite, const char* property, const std::function<Outcome()>& body) {
  Verdict v;
  v.suite = suite;
  v.property = property;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto o = body();
    v.pass = o.pass;
    v.detail = std::move(o.detail);
  } catch (const Error& e) {
    v.pass = false;
    v.detail = fmt::format("error={} message=\"{}\"", error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = fmt::format("error=internal message=\"{}\"", e.what());
  }
  v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

std::uint64_t ipow(std::int64_t q, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) r *= static_cast<std::uint64_t>(q);
  return r;
}

GaussianBatch exact_batch(const ExactSampler& sampler, int n, std::size_t count, RngStream& rng) {
  GaussianBatch out;
  out.n = n;
  out.width = sampler.width();
  out.stream_id = rng.stream_id();
  out.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.points.push_back(sampler.sample(rng));
  return out;
}

// Draws from `sampler` in parallel; chunk order keeps the result worker invariant.
std::vector<LatticePoint> draw_points(const std::function<LatticePoint(RngStream&)>& draw,
                                      std::uint64_t count, const RngStream& rng, int workers) {
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  using Acc = std::vector<std::pair<std::uint64_t, std::vector<LatticePoint>>>;
  auto parts = parallel_reduce(
      chunks, workers, Acc{},
      [&](Acc& acc, std::uint64_t c) {
        RngStream r = rng.split(c);
        std::vector<LatticePoint> pts;
        const std::uint64_t hi = std::min(count, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < hi; ++i) pts.push_back(draw(r));
        acc.emplace_back(c, std::move(pts));
      },
      [](Acc& a, Acc&& b) { a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end())); });
  std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<LatticePoint> out;
  out.reserve(count);
  for (auto& [c, pts] : parts) out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

// Empirical SD between the sample histogram and the reference table, with the
// expected sampling inflation sum_i min(p_i, sqrt(p_i/N))/2 + 3/sqrt(N).
std::pair<double, double> empirical_sd(const std::vector<LatticePoint>& pts, const ExactSampler& ref) {
  std::unordered_map<LatticePoint, std::uint64_t, LatticePointHash> hist;
  for (const auto& p : pts) ++hist[p];
  const double N = static_cast<double>(pts.size());
  double sd = 0.0, slack = 0.0, covered = 0.0;
  const auto& sup = ref.support();
  const auto& pr = ref.probabilities();
  for (std::size_t i = 0; i < sup.size(); ++i) {
    auto it = hist.find(sup[i]);
    const double emp = it == hist.end() ? 0.0 : it->second / N;
    if (it != hist.end()) covered += it->second;
    sd += std::abs(emp - pr[i]);
    slack += std::min(pr[i], std::sqrt(pr[i] / N));
  }
  sd += (N - covered) / N;
  return {0.5 * sd, 0.5 * slack + 3.0 / std::sqrt(N)};
}

std::vector<double> planted_target(const LatticeBasis& b, const IntVector& z, double r, RngStream& rng) {
  auto x = b.embed_double(z);
  auto u = sample_unit_sphere(b.rank(), rng);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += r * u[i];
  return x;
}

IntVector random_coeffs(int n, std::int64_t bound, RngStream& rng) {
  IntVector z(n);
  for (auto& v : z) v = rng.uniform_int(-bound, bound);
  return z;
}

}  // namespace

std::string Verdict::line() const {
  std::string out = fmt::format("verdict suite={} property={} pass={}", suite, property, pass ? 1 : 0);
  if (!detail.empty()) out += " " + detail;
  out += fmt::format(" seconds={:.3f}", seconds);
  return out;
}

// ---- lattice

Verdict check_dual_pairing(int instances, std::uint64_t seed) {
  return timed("lattice", "dual-pairing", [&] {
    RngStream rng(seed, 0x1a01);
    int ok = 0;
    for (int t = 0; t < instances; ++t) {
      auto b = random_integer_basis(2 + t % 5, 6, rng);
      ok += pairing_is_identity(dual_basis(b), b);
    }
    return Outcome{ok == instances, fmt::format("instances={} exact={}", instances, ok)};
  });
}

Verdict check_enumeration_box_scan(int instances, std::uint64_t seed) {
  return timed("lattice", "enumeration-box-scan", [&] {
    RngStream rng(seed, 0x1a02);
    int ok = 0, points = 0;
    for (int t = 0; t < instances; ++t) {
      const int n = 2 + t % 4;
      auto b = lll_reduce(random_integer_basis(n, 4, rng)).basis;
      std::vector<double> c(n);
      for (auto& x : c) x = 4 * rng.uniform() - 2;
      const double r = 1.3 * LatticeEnumerator(b).lambda1();
      std::set<LatticePoint> got;
      for (auto& p : enumerate_within(b, c, r)) got.insert(p);
      // |z_i - <b*_i, c>| <= r |b*_i| for every point in the ball.
      const auto xi = b.coordinates(c);
      IntVector lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        const double w = r * std::sqrt(sq_norm(b.inverse_rows_double()[i]));
        lo[i] = static_cast<std::int64_t>(std::floor(xi[i] - w)) - 1;
        hi[i] = static_cast<std::int64_t>(std::ceil(xi[i] + w)) + 1;
      }
      std::set<LatticePoint> want;
      IntVector z = lo;
      while (true) {
        auto v = b.embed_double(z);
        double s = 0;
        for (int i = 0; i < n; ++i) s += (v[i] - c[i]) * (v[i] - c[i]);
        if (s <= r * r * (1 - 1e-12)) want.insert(LatticePoint{z});
        int k = n - 1;
        while (k >= 0 && z[k] == hi[k]) z[k] = lo[k], --k;
        if (k < 0) break;
        ++z[k];
      }
      // Points within rounding of the sphere may go either way.
      bool same = true;
      for (const auto& p : want) same &= got.count(p) > 0;
      for (const auto& p : got)
        if (!want.count(p)) {
          auto v = b.embed_double(p.coeffs);
          double s = 0;
          for (int i = 0; i < n; ++i) s += (v[i] - c[i]) * (v[i] - c[i]);
          same &= s <= r * r * (1 + 1e-9);
        }
      ok += same;
      points += static_cast<int>(want.size());
    }
    return Outcome{ok == instances, fmt::format("instances={} equal={} points={}", instances, ok, points)};
  });
}

Verdict check_lll_bound(int instances, std::uint64_t seed) {
  return timed("lattice", "lll-first-vector", [&] {
    RngStream rng(seed, 0x1a03);
    int ok = 0;
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
      const int n = 2 + t % 5;
      auto b = random_integer_basis(n, 8, rng);
      auto red = lll_reduce(b).basis;
      const Rational b1 = sq_norm_exact(red.column(0));
      const Rational lam = LatticeEnumerator(b).lambda1_squared();
      ok += b1 <= lam * Rational(mpz_class(1) << (n - 1));
      worst = std::max(worst, std::sqrt(to_double(b1 / lam)));
    }
    return Outcome{ok == instances, fmt::format("instances={} within_bound={} worst_ratio={:.4f}", instances, ok, worst)};
  });
}

Verdict check_coset_homomorphism(int instances, std::uint64_t seed) {
  return timed("lattice", "coset-homomorphism", [&] {
    RngStream rng(seed, 0x1a04);
    int bad = 0;
    for (int t = 0; t < instances; ++t) {
      const int n = 1 + t % 6;
      const std::int64_t q = 2 + t % 4;
      LatticePoint a{random_coeffs(n, 50, rng)}, c{random_coeffs(n, 50, rng)};
      if (coset_label(a + c, q) != coset_label(a, q) + coset_label(c, q)) ++bad;
      if (coset_label(a - c, q) != coset_label(a, q) - coset_label(c, q)) ++bad;
      bool divisible = true;
      for (auto x : a.coeffs) divisible &= x % q == 0;
      if (coset_label(a, q).is_zero() != divisible) ++bad;
      if (!coset_label(a.scaled(q), q).is_zero()) ++bad;
    }
    return Outcome{bad == 0, fmt::format("instances={} violations={}", instances, bad)};
  });
}

// ---- gauss

Verdict check_coset_uniformity(const std::vector<std::int64_t>& qs, int max_n,
                               const std::vector<double>& epss, std::uint64_t draws,
                               std::uint64_t seed, int workers) {
  return timed("gauss", "coset-uniformity", [&] {
    int configs = 0, ok = 0;
    double worst_margin = 1e9;
    std::string failed;
    for (auto q : qs)
      for (int n = 1; n <= max_n; ++n)
        for (double eps : epss) {
          auto b = LatticeBasis::identity(n);
          const double s = smoothing_parameter(b.scaled(Rational(q)), eps).s_hi;
          ExactSampler sampler(b, s);
          RngStream rng(seed, 0x9a00 + configs);
          const std::uint64_t cells = ipow(q, n);
          constexpr std::uint64_t kChunk = 1 << 15;
          const std::uint64_t chunks = (draws + kChunk - 1) / kChunk;
          auto hist = parallel_reduce(
              chunks, workers, std::vector<std::uint64_t>(cells, 0),
              [&](std::vector<std::uint64_t>& h, std::uint64_t c) {
                RngStream r = rng.split(c);
                const std::uint64_t hi = std::min(draws, (c + 1) * kChunk);
                for (std::uint64_t i = c * kChunk; i < hi; ++i) ++h[coset_label(sampler.sample(r), q).index()];
              },
              [](std::vector<std::uint64_t>& a, std::vector<std::uint64_t>&& b) {
                for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
              });
          double sd = 0.0;
          for (auto h : hist) sd += std::abs(static_cast<double>(h) / draws - 1.0 / cells);
          sd *= 0.5;
          const double bound = 2 * eps + 3 * std::sqrt(static_cast<double>(cells) / draws);
          ++configs;
          if (sd <= bound) {
            ++ok;
          } else {
            failed += fmt::format("{}q{}n{}e{}", failed.empty() ? "" : ",", q, n, eps);
          }
          worst_margin = std::min(worst_margin, bound - sd);
        }
    return Outcome{ok == configs, fmt::format("configs={} within={} draws={} min_margin={:.5f}{}", configs, ok,
                                              draws, worst_margin, failed.empty() ? "" : " failed=" + failed)};
  });
}

Verdict check_coset_mass_ratio(int instances, std::uint64_t seed) {
  return timed("gauss", "coset-mass-ratio", [&] {
    RngStream rng(seed, 0x9a01);
    int ok = 0;
    double worst = 1.0;
    for (int t = 0; t < instances; ++t) {
      const int n = 2 + t % 2;
      auto b = random_integer_basis(n, 3, rng);
      const double eps = t % 2 ? 0.1 : 0.5;
      const double s = smoothing_parameter(b, eps).s_hi;
      std::vector<double> c(n), zero(n, 0.0);
      for (auto& v : c) v = rng.uniform() * 5 - 2.5;
      const double ratio = rho_mass(b, c, s) / rho_mass(b, zero, s);
      const double lo = (1 - eps) / (1 + eps);
      ok += ratio >= lo && ratio <= 1.0 + 1e-12;
      worst = std::min(worst, ratio - lo);
    }
    return Outcome{ok == instances, fmt::format("instances={} within={} min_margin={:.6f}", instances, ok, worst)};
  });
}

Verdict check_convolution(const std::vector<double>& epss, std::uint64_t draws, std::uint64_t seed, int workers) {
  return timed("gauss", "convolution", [&] {
    RngStream brng(seed, 0x9a02);
    std::vector<LatticeBasis> bases = {LatticeBasis::identity(2), lll_reduce(random_integer_basis(2, 3, brng)).basis,
                                       lll_reduce(random_integer_basis(3, 2, brng)).basis};
    int configs = 0, ok = 0;
    double worst = 1e9, min_p = 1.0;
    for (const auto& b : bases)
      for (double eps : epss) {
        const double eta = smoothing_parameter(b, eps).s_hi;
        const double s1 = std::sqrt(2.0) * eta;
        ExactSampler part(b, s1);
        ExactSampler ref(b, std::sqrt(2.0) * s1);
        RngStream rng(seed, 0x9b00 + configs);
        auto pts = draw_points([&](RngStream& r) { return part.sample(r) + part.sample(r); }, draws, rng, workers);
        auto [sd, slack] = empirical_sd(pts, ref);
        const double p = chi_square_gof(pts, ref).p_value;
        ++configs;
        ok += sd <= 2 * eps + slack;
        worst = std::min(worst, 2 * eps + slack - sd);
        min_p = std::min(min_p, p);
      }
    return Outcome{ok == configs, fmt::format("configs={} within={} draws={} min_margin={:.5f} min_gof_p={:.4f}",
                                              configs, ok, draws, worst, min_p)};
  });
}

Verdict check_scaled_smoothing(int instances, std::uint64_t seed) {
  return timed("gauss", "scaled-smoothing-bound", [&] {
    RngStream rng(seed, 0x9a03);
    int checks = 0, ok = 0;
    for (int t = 0; t < instances; ++t) {
      auto b = random_integer_basis(2 + t % 3, 4, rng);
      for (double eps : {0.5, 0.1}) {
        const double eta = smoothing_parameter(b, eps).s_hi;
        for (int k : {2, 3}) {
          ++checks;
          ok += k * eta > smoothing_parameter(b, std::pow(eps, k * k)).s_lo;
        }
      }
    }
    return Outcome{ok == checks, fmt::format("checks={} held={}", checks, ok)};
  });
}

Verdict check_dual_smoothing_lambda(int instances, std::uint64_t seed) {
  return timed("gauss", "dual-smoothing-lambda", [&] {
    RngStream rng(seed, 0x9a04);
    int checks = 0, ok = 0;
    double worst = 1e9;
    for (int t = 0; t < instances; ++t) {
      auto b = random_integer_basis(2 + t % 4, 4, rng);
      auto dual = dual_basis(b).lattice;
      const double lam = LatticeEnumerator(b).lambda1();
      for (double eps : {0.1, 0.01}) {
        const double lhs = std::sqrt(std::log(1 / eps) / kPi);
        const double rhs = lam * smoothing_parameter(dual, eps).s_lo;
        ++checks;
        ok += lhs < rhs;
        worst = std::min(worst, rhs / lhs);
      }
    }
    return Outcome{ok == checks, fmt::format("checks={} held={} min_ratio={:.4f}", checks, ok, worst)};
  });
}

// ---- combiner

namespace {

struct CombinerCase {
  LatticeBasis basis;
  std::int64_t q;
};

std::vector<CombinerCase> combiner_cases(int n, std::int64_t q, std::uint64_t seed) {
  std::vector<CombinerCase> out;
  std::vector<std::int64_t> qs = q > 0 ? std::vector<std::int64_t>{q} : std::vector<std::int64_t>{2, 4};
  RngStream rng(seed, 0xc0b0);
  for (auto qq : qs) {
    if (n > 0) {
      out.push_back({LatticeBasis::identity(n), qq});
    } else {
      out.push_back({LatticeBasis::identity(2), qq});
      out.push_back({lll_reduce(random_integer_basis(2, 3, rng)).basis, qq});
      out.push_back({LatticeBasis::identity(3), qq});
    }
  }
  return out;
}

}  // namespace

Verdict check_combiner_distribution(int n, std::int64_t q, std::uint64_t outputs, std::uint64_t seed, int workers) {
  return timed("combiner", "output-distribution", [&] {
    int configs = 0, ok = 0;
    std::uint64_t audited = 0, emitted = 0;
    double min_p = 1.0;
    std::string pvals;
    for (const auto& cs : combiner_cases(n, q, seed)) {
      const int dim = cs.basis.rank();
      CombinerConfig cfg;
      cfg.q = cs.q;
      const double s = 2 * cfg.q * smoothing_parameter(cs.basis, cfg.eps).s_hi;
      ExactSampler src(cs.basis, s);
      ExactSampler ref(cs.basis, cfg.width_out(s));
      RngStream rng(seed, 0xc000 + configs);
      std::vector<LatticePoint> pooled;
      std::uint64_t call = 0;
      constexpr std::uint64_t kRound = 16;
      while (pooled.size() < outputs) {
        struct Part {
          std::uint64_t call;
          std::vector<LatticePoint> pts;
          std::uint64_t audited;
        };
        using Acc = std::vector<Part>;
        auto parts = parallel_reduce(
            kRound, workers, Acc{},
            [&](Acc& acc, std::uint64_t i) {
              RngStream r = rng.split(call + i);
              auto in = exact_batch(src, dim, cfg.input_count(dim), r);
              auto res = combine_batch(in, cfg, r, &cs.basis, true);
              const bool held = res.audit.size() == res.batch.size() && audit_holds(in, res);
              acc.push_back({call + i, res.batch.points, held ? res.batch.size() : 0});
            },
            [](Acc& a, Acc&& b) { a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end())); });
        std::sort(parts.begin(), parts.end(), [](const Part& x, const Part& y) { return x.call < y.call; });
        for (auto& p : parts) {
          emitted += p.pts.size();
          audited += p.audited;
          pooled.insert(pooled.end(), p.pts.begin(), p.pts.end());
        }
        call += kRound;
      }
      pooled.resize(outputs);
      const double p = chi_square_gof(pooled, ref).p_value;
      ++configs;
      ok += p > 0.01;
      min_p = std::min(min_p, p);
      pvals += fmt::format("{}{:.4f}", pvals.empty() ? "" : ",", p);
    }
    const bool all_audited = audited == emitted;
    return Outcome{ok == configs && all_audited,
                   fmt::format("configs={} gof_pass={} outputs={} p_values={} min_p={:.4f} audited={}/{}", configs, ok,
                               outputs, pvals, min_p, audited, emitted)};
  });
}

Verdict check_combiner_coset_blind(int n, std::int64_t q, std::uint64_t seed) {
  return timed("combiner", "coset-blind", [&] {
    const int dim = n > 0 ? n : 2;
    CombinerConfig cfg;
    cfg.q = q > 0 ? q : 4;
    auto b = LatticeBasis::identity(dim);
    const double s = 2 * cfg.q * smoothing_parameter(b, cfg.eps).s_hi;
    ExactSampler sampler(b, s);
    RngStream src(seed, 0xc101);
    auto a = exact_batch(sampler, dim, cfg.input_count(dim), src);
    // Same labels, embeddings redrawn from D_{qL + c, s} by rejection.
    auto c = a;
    for (auto& p : c.points) {
      const auto want = coset_label(p, cfg.q);
      LatticePoint fresh;
      do fresh = sampler.sample(src);
      while (coset_label(fresh, cfg.q) != want);
      p = fresh;
    }
    RngStream r1(seed, 0xc102), r2(seed, 0xc102);
    auto ra = combine_batch(a, cfg, r1, nullptr, true);
    auto rc = combine_batch(c, cfg, r2, nullptr, true);
    bool same = ra.audit.size() == rc.audit.size();
    for (std::size_t i = 0; same && i < ra.audit.size(); ++i)
      same = ra.audit[i].anchor == rc.audit[i].anchor && ra.audit[i].tuple == rc.audit[i].tuple;
    bool differ = false;
    for (std::size_t i = 0; i < a.points.size(); ++i) differ |= a.points[i] != c.points[i];
    return Outcome{same && differ && !ra.audit.empty(),
                   fmt::format("n={} q={} selections={} identical={}", dim, cfg.q, ra.audit.size(), same ? 1 : 0)};
  });
}

Verdict check_leftover_hash(int trials, std::uint64_t seed) {
  return timed("combiner", "leftover-hash", [&] {
    // G = (Z mod 2)^2 as 2-bit words, f = 12, every weight-4 indicator.
    const int f = 12, w = 4;
    std::vector<int> ys;
    for (int mask = 0; mask < (1 << f); ++mask)
      if (std::popcount(static_cast<unsigned>(mask)) == w) ys.push_back(mask);
    RngStream rng(seed, 0xc103);
    double sd = 0.0;
    for (int t = 0; t < trials; ++t) {
      std::vector<int> x(f);
      for (auto& v : x) v = static_cast<int>(rng.uniform_int(0, 3));
      std::vector<double> hist(4, 0.0);
      for (int y : ys) {
        int acc = 0;
        for (int i = 0; i < f; ++i)
          if (y >> i & 1) acc ^= x[i];
        hist[acc] += 1.0 / ys.size();
      }
      std::vector<double> u(4, 0.25);
      sd += statistical_distance(hist, u) / trials;
    }
    const double bound = 0.5 * std::sqrt(4.0 / ys.size()) + 3.0 / std::sqrt(static_cast<double>(trials));
    return Outcome{sd <= bound, fmt::format("support={} trials={} sd={:.5f} bound={:.5f}", ys.size(), trials, sd, bound)};
  });
}

Verdict check_combiner_output_count(int runs, std::uint64_t seed) {
  return timed("combiner", "output-count", [&] {
    int configs = 0;
    bool pass = true;
    std::string rates;
    for (int n : {2, 3}) {
      auto b = LatticeBasis::identity(n);
      CombinerConfig cfg;
      cfg.q = 2;
      const double s = 2 * cfg.q * smoothing_parameter(b, cfg.eps).s_hi;
      ExactSampler sampler(b, s);
      int ok = 0;
      for (int r = 0; r < runs; ++r) {
        RngStream rng(seed, 0xc200 + 1000 * n + r);
        auto in = exact_batch(sampler, n, cfg.input_count(n), rng);
        ok += combine_batch(in, cfg, rng).batch.size() >= ipow(cfg.q, n);
      }
      pass &= ok >= 0.99 * runs;
      rates += fmt::format("{}n{}:{}/{}", rates.empty() ? "" : ",", n, ok, runs);
      ++configs;
    }
    return Outcome{pass, "reached=" + rates};
  });
}

// ---- smoothing

Verdict check_dense_inclusion(int instances, std::uint64_t seed) {
  return timed("smoothing", "inclusion-and-index", [&] {
    RngStream rng(seed, 0xd001);
    int ok = 0;
    for (int t = 0; t < instances; ++t) {
      const int n = 2 + t % 5;
      auto b = random_integer_basis(n, 5, rng);
      const int a = default_index_log(n);
      auto ds = dense_superlattice(b, a, rng);
      ok += ds.verify() && ds.dense.abs_determinant() * Rational(mpz_class(1) << a) == b.abs_determinant();
    }
    return Outcome{ok == instances, fmt::format("instances={} certified={}", instances, ok)};
  });
}

Verdict check_smoothing_rejection(std::uint64_t draws, std::uint64_t seed) {
  return timed("smoothing", "rejection-distribution", [&] {
    RngStream rng(seed, 0xd002);
    bool pass = true;
    std::string detail;
    int idx = 0;
    for (auto b : {LatticeBasis::identity(2), lll_reduce(random_integer_basis(3, 3, rng)).basis}) {
      const double s = 1.1 * smoothing_parameter(b, 1.0 / 3.0).s_hi;
      SmoothingSampleStats stats;
      RngStream r = rng.split(idx);
      auto batch = sample_at_smoothing(b, s, draws, r, &stats);
      const double p = chi_square_gof(batch.points, ExactSampler(b, s)).p_value;
      pass &= batch.size() == draws && p > 0.01;
      detail += fmt::format("{}n{}_p={:.4f} n{}_subspaces={}", detail.empty() ? "" : " ", b.rank(), p, b.rank(),
                            stats.distinct_subspaces);
      ++idx;
    }
    // Acceptance rate against the exact mass ratio for one fixed dense lattice.
    auto b = random_integer_basis(3, 3, rng);
    const double s = smoothing_parameter(b, 1.0 / 3.0).s_hi;
    const int a = default_index_log(3);
    auto ds = dense_superlattice(b, a, rng);
    ExactSampler sampler(ds.dense, s);
    std::uint64_t kept = 0;
    for (std::uint64_t i = 0; i < draws; ++i) kept += ds.contains_base_point(sampler.sample(rng).coeffs, nullptr);
    std::vector<double> zero(3, 0.0);
    const double ratio = rho_mass(b, zero, s) / rho_mass(ds.dense, zero, s);
    const double rate = static_cast<double>(kept) / draws;
    const double eps = smoothing_eps(ds.dense, s);
    const bool rate_ok = std::abs(rate - ratio) <= 3 * std::sqrt(ratio * (1 - ratio) / draws) &&
                         ratio >= std::pow(2.0, -a) * (1 - eps) / (1 + eps);
    pass &= rate_ok;
    detail += fmt::format(" accept_rate={:.5f} mass_ratio={:.5f} floor={:.5f}", rate, ratio,
                          std::pow(2.0, -a) * (1 - eps) / (1 + eps));
    return Outcome{pass, detail};
  });
}

// ---- bdd

Verdict check_bdd_periodicity(const LatticeBasis& basis, std::uint64_t seed) {
  return timed("bdd", "periodicity", [&] {
    RngStream rng(seed, 0xbd01);
    auto o = build_bdd_oracle(basis, 1e-3, rng);
    const int n = basis.rank();
    int bad = 0, checks = 0;
    for (int t = 0; t < 20; ++t) {
      RationalVector x(n);
      for (auto& v : x) v = Rational(rng.uniform_int(-50, 50), rng.uniform_int(1, 30));
      for (auto& v : x) v.canonicalize();
      const auto bz = basis.embed(random_coeffs(n, 9, rng));
      RationalVector y(n);
      for (int i = 0; i < n; ++i) y[i] = x[i] + bz[i];
      checks += 2;
      bad += periodic_gaussian_estimate(o, x) != periodic_gaussian_estimate(o, y);
      bad += periodic_gaussian_estimate(o, bz) != 1.0;
    }
    return Outcome{bad == 0, fmt::format("n={} m={} checks={} mismatches={}", n, o.m, checks, bad)};
  });
}

Verdict check_bdd_radius_monotone(const LatticeBasis& basis, int trials, std::uint64_t seed) {
  return timed("bdd", "success-vs-radius", [&] {
    RngStream rng(seed, 0xbd02);
    auto o = build_bdd_oracle(basis, 1e-3, rng);
    const double unit = o.alpha * o.lambda1;
    const std::vector<double> fracs = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    std::vector<double> rates;
    for (double f : fracs) {
      int hit = 0;
      for (int t = 0; t < trials; ++t) {
        IntVector z = random_coeffs(basis.rank(), 5, rng);
        auto x = planted_target(basis, z, f * unit, rng);
        try {
          hit += bdd_decode(o, x).coeffs == z;
        } catch (const NotConverged&) {
        }
      }
      rates.push_back(static_cast<double>(hit) / trials);
    }
    // Allow sampling noise between neighbours: 3 sd of a difference of two rates at 1/2.
    const double tol = 3 * std::sqrt(0.5 / trials);
    bool mono = true;
    for (std::size_t i = 1; i < rates.size(); ++i) mono &= rates[i] <= rates[i - 1] + tol;
    std::string rs;
    for (std::size_t i = 0; i < rates.size(); ++i) rs += fmt::format("{}{}:{:.3f}", i ? "," : "", fracs[i], rates[i]);
    return Outcome{mono && rates.front() >= 0.95,
                   fmt::format("alpha={:.4f} trials={} rates={}", o.alpha, trials, rs)};
  });
}

Verdict check_bdd_alpha_chain(int instances, std::uint64_t seed) {
  return timed("bdd", "alpha-chain", [&] {
    RngStream rng(seed, 0xbd03);
    const double ln_beta = kKissingExponent * std::numbers::ln2;
    int checks = 0, ok = 0, skipped = 0;
    double worst = 1e9;
    for (int t = 0; t < instances; ++t) {
      // n <= 4: the exact dual table at small eps outgrows memory at n = 5.
      const int n = 2 + t % 3;
      auto b = lll_reduce(random_integer_basis(n, 4, rng)).basis;
      // The bound assumes a kissing number of at most beta^n.
      LatticeEnumerator en(b);
      const auto shortest = en.within(std::vector<double>(n, 0.0), en.lambda1() * (1 + 1e-9));
      if (std::log(static_cast<double>(shortest.size() - 1)) > n * ln_beta) {
        skipped += 2;
        continue;
      }
      // Small-eps form of the bound; see the ledger for eps = 5e-3.
      for (double eps : {1e-3, 1e-4}) {
        auto o = build_bdd_oracle(b, eps, rng);
        const double l = std::log(1 / o.eps);
        const double floor = 0.5 * std::sqrt(l / (l + n * ln_beta));
        ++checks;
        ok += o.phi / o.lambda1 > floor;
        worst = std::min(worst, o.phi / o.lambda1 - floor);
      }
    }
    return Outcome{checks > 0 && ok == checks,
                   fmt::format("checks={} held={} kissing_above_beta_n={} min_margin={:.4f}", checks, ok, skipped, worst)};
  });
}

Verdict check_bdd_oracle_reuse(const LatticeBasis& basis, std::uint64_t seed) {
  return timed("bdd", "oracle-reuse", [&] {
    RngStream rng(seed, 0xbd04);
    BddOptions bo;
    const double eps = eps_for_alpha(basis, kShiftedMinAlpha, bo);
    auto oracle = std::make_shared<const BddOracle>(build_bdd_oracle(basis, eps, rng, bo));
    const auto before = oracle->dual_coeffs;
    GaussianBddDecoder dec(oracle);
    EnumerationGrid g{3, std::vector<double>(basis.rank(), 0.0), &dec};
    std::uint64_t queries = 0, declined = 0;
    double best = 0.0;
    enumerate_via_bdd(g, [&](std::uint64_t, const IntVector&, const std::optional<LatticePoint>& y) {
      ++queries;
      if (!y) {
        ++declined;
        return;
      }
      if (y->is_zero()) return;
      const double nn = std::sqrt(sq_norm(basis.embed_double(y->coeffs)));
      if (best == 0.0 || nn < best) best = nn;
    });
    const bool unchanged = oracle->dual_coeffs == before && oracle->m == before.size();
    const std::uint64_t need = ipow(3, basis.rank());
    return Outcome{unchanged && queries >= need,
                   fmt::format("queries={} required={} declined={} m={} samples_unchanged={} best_norm={:.6f} lambda1={:.6f}",
                               queries, need, declined, oracle->m, unchanged ? 1 : 0, best, oracle->lambda1)};
  });
}

// ---- svp

Verdict check_enumeration_completeness(int instances, int max_n, const std::vector<std::int64_t>& ps,
                                       std::uint64_t seed, int workers) {
  return timed("svp", "enumeration-completeness", [&] {
    RngStream rng(seed, 0x5a01);
    int runs = 0, ok = 0;
    std::uint64_t points = 0;
    for (int t = 0; t < instances; ++t) {
      const int n = 2 + t % (max_n - 1);
      auto b = random_integer_basis(n, 4, rng);
      const double alpha = 0.2 + 0.25 * rng.uniform();
      ExactBddDecoder dec(b, alpha);
      std::vector<double> tg(n);
      for (auto& x : tg) x = 3 * rng.uniform() - 1.5;
      for (auto p : ps) {
        EnumerationGrid g{p, tg, &dec};
        auto ys = enumeration_yield_set(g, workers);
        std::set<LatticePoint> yields(ys.begin(), ys.end());
        auto want = enumerate_within(b, tg, p * alpha * dec.lambda1());
        bool inc = true;
        for (const auto& w : want) inc &= yields.count(w) > 0;
        ++runs;
        ok += inc;
        points += want.size();
      }
    }
    return Outcome{ok == runs, fmt::format("runs={} complete={} ball_points={}", runs, ok, points)};
  });
}

Verdict check_shifted_min_exact(int instances, int max_n, std::uint64_t seed, int workers) {
  return timed("svp", "shifted-min-exact", [&] {
    RngStream rng(seed, 0x5a02);
    SolverOptions opts;
    opts.workers = workers;
    int ok = 0, zero = 0;
    for (int t = 0; t < instances; ++t) {
      auto b = random_integer_basis(2 + t % (max_n - 1), 5, rng);
      RngStream r = rng.split(t);
      auto [run, rep] = svp_shifted_min(b, r, opts);
      ok += run.success && run.queries_made == rep.classical_queries;
      zero += run.best.is_zero();
    }
    return Outcome{ok == instances && zero == 0,
                   fmt::format("instances={} found_lambda1={} zero_returns={}", instances, ok, zero)};
  });
}

Verdict check_caps_exact(int instances, int max_n, std::uint64_t budget, std::uint64_t seed, int workers) {
  return timed("svp", "caps-exact", [&] {
    RngStream rng(seed, 0x5a03);
    SolverOptions opts;
    opts.workers = workers;
    int ok = 0;
    for (int t = 0; t < instances; ++t) {
      auto b = random_integer_basis(2 + t % (max_n - 1), 5, rng);
      RngStream r = rng.split(t);
      ok += svp_spherical_caps(b, kCapAlpha, budget, r, opts).success;
    }
    return Outcome{ok == instances, fmt::format("instances={} budget={} found_lambda1={}", instances, budget, ok)};
  });
}

Verdict check_shifted_min_gaussian(int max_n, int seeds, std::uint64_t seed, int workers) {
  return timed("svp", "shifted-min-dual-samples", [&] {
    RngStream rng(seed, 0x5a04);
    SolverOptions opts;
    opts.decoder = DecoderKind::kGaussian;
    opts.workers = workers;
    bool pass = true;
    std::string rates;
    double min_alpha = 1.0;
    for (int n = 2; n <= max_n; ++n) {
      auto b = lll_reduce(random_integer_basis(n, 4, rng)).basis;
      int ok = 0;
      for (int s = 0; s < seeds; ++s) {
        RngStream r(seed + static_cast<std::uint64_t>(s), 0x5b00 + n);
        auto [run, rep] = svp_shifted_min(b, r, opts);
        ok += run.success;
        min_alpha = std::min(min_alpha, run.alpha);
      }
      pass &= ok >= 0.9 * seeds;
      rates += fmt::format("{}n{}:{}/{}", rates.empty() ? "" : ",", n, ok, seeds);
    }
    return Outcome{pass, fmt::format("success={} min_alpha={:.4f}", rates, min_alpha)};
  });
}

Verdict check_cap_success_rate(int n, std::uint64_t targets, std::uint64_t seed, int workers) {
  return timed("svp", "cap-success-rate", [&] {
    auto b = LatticeBasis::identity(n);
    ExactBddDecoder dec(b, kCapAlpha);
    const double r = cap_radius(n, kCapAlpha, 1.0, CapRadiusPolicy::kAlpha);
    RngStream rng(seed, 0x5a05);
    auto lv = cap_success_rate(dec, r, targets, rng, workers);
    const double rate = static_cast<double>(lv.successes) / lv.targets;
    // Capture happens iff some +-e_i lies within 2 alpha of the target, i.e.
    // max |u_i| >= cos(phi) for the direction u. Estimated from Gaussian directions.
    const double cphi = (r * r + 1 - 4 * kCapAlpha * kCapAlpha) / (2 * r);
    std::mt19937_64 eng(seed ^ 0x5eedull);
    std::normal_distribution<double> g;
    const int draws = 1'000'000;
    int hit = 0;
    for (int i = 0; i < draws; ++i) {
      double ss = 0, mx = 0;
      for (int k = 0; k < n; ++k) {
        const double v = g(eng);
        ss += v * v;
        mx = std::max(mx, std::abs(v));
      }
      hit += mx >= cphi * std::sqrt(ss);
    }
    const double predicted = static_cast<double>(hit) / draws;
    const double single = std::exp2(-n * cap_fraction_exponent_quadrature(std::acos(cphi), n)) / std::sqrt(n);
    const double sigma = std::sqrt(predicted * (1 - predicted) / targets) + std::sqrt(0.25 / draws);
    return Outcome{std::abs(rate - predicted) <= 4 * sigma,
                   fmt::format("n={} targets={} rate={:.4f} predicted={:.4f} single_cap={:.4f} radius={:.4f}", n,
                               lv.targets, rate, predicted, single, r)};
  });
}

Verdict check_svp_on_basis(const LatticeBasis& basis, std::uint64_t seed, int workers) {
  return timed("svp", "solvers-on-basis", [&] {
    SolverOptions opts;
    opts.workers = workers;
    RngStream r1(seed, 0x5a06), r2(seed, 0x5a07);
    auto [run, rep] = svp_shifted_min(basis, r1, opts);
    auto caps = svp_spherical_caps(basis, kCapAlpha, 60, r2, opts);
    return Outcome{run.success && caps.success,
                   fmt::format("n={} lambda1={:.6f} shifted_min_norm={:.6f} caps_norm={:.6f} queries={}", basis.rank(),
                               run.lambda1_oracle, run.best_norm, caps.best_norm, run.queries_made)};
  });
}

Verdict check_query_accounting() {
  return timed("svp", "query-accounting", [&] {
    bool ok = quantum_query_count(3, 10) == 243 && quantum_query_count(3, 3) == 6 && quantum_query_count(2, 4) == 4 &&
              quantum_query_count(2, 5) == 6;
    RngStream rng(1, 0x5a08);
    auto [run, rep] = svp_shifted_min(LatticeBasis::identity(3), rng);
    ok &= run.queries_made == 27 && rep.classical_queries == 27 && rep.quantum_queries == 6;
    return Outcome{ok, fmt::format("z3_classical={} z3_quantum={} q3n10={}", rep.classical_queries,
                                   rep.quantum_queries, quantum_query_count(3, 10))};
  });
}

// ---- cost

Verdict check_cost_endpoints() {
  return timed("cost", "endpoints", [&] {
    const double cap_small = capping_exponent(kKissingExponent, EpsRegime::kSmall, false).c;
    const double minfind_q = minfind_exponent(kKissingExponent, true).c;
    const double cap_large = capping_exponent(0.0, EpsRegime::kLarge, false).c;
    const double cap_large_q = capping_exponent(0.0, EpsRegime::kLarge, true).c;
    const bool ok = std::abs(cap_small - 1.741) <= 1e-3 && std::abs(minfind_q - 0.9535) <= 1e-3 &&
                    std::abs(cap_large - 1.292) <= 1e-3 && std::abs(cap_large_q - 0.750) <= 1e-3;
    return Outcome{ok, fmt::format("cap_small_classical_b0.402={:.6f} minfind_quantum_b0.402={:.6f} "
                                   "cap_large_classical_b0={:.6f} cap_large_quantum_b0={:.6f}",
                                   cap_small, minfind_q, cap_large, cap_large_q)};
  });
}

Verdict check_bdd_exponents() {
  return timed("cost", "bdd-exponents", [&] {
    const double q1 = bdd_query_exponent(0.322), b1 = bdd_build_exponent(0.322);
    const double q2 = bdd_query_exponent(0.8216), b2 = bdd_build_exponent(0.8216);
    const bool ok = std::abs(q1 - 0.161) < 1e-12 && std::abs(b1 - 0.661) < 1e-12 && std::abs(q2 - 0.4108) < 1e-12 &&
                    std::abs(b2 - 0.9108) < 1e-12;
    return Outcome{ok, fmt::format("query_0.322={:.4f} build_0.322={:.4f} query_0.8216={:.4f} build_0.8216={:.4f}", q1,
                                   b1, q2, b2)};
  });
}

Verdict check_cap_constants() {
  return timed("cost", "cap-constants", [&] {
    const double alpha = alpha_small_eps(0.8216, kKissingExponent);
    const double ex = cap_fraction_exponent(cap_angle(alpha, CapPolicy::kAlpha).phi);
    const bool ok = std::abs(alpha - 0.4097) <= 5e-4 && std::abs(ex - 0.3298) <= 5e-4;
    return Outcome{ok, fmt::format("alpha={:.6f} cap_exponent={:.6f}", alpha, ex)};
  });
}

Verdict check_curve_shape(int workers) {
  return timed("cost", "curve-shape", [&] {
    std::map<std::string, std::vector<CostPoint>> rows;
    for (auto v : CurveVariant::all()) rows[v.name()] = emit_curve(v, kCurveStep, CapPolicy::kOptimal, workers);
    bool ok = true;
    int violations = 0;
    for (auto v : CurveVariant::all()) {
      const auto& r = rows[v.name()];
      ok &= r.size() == 202;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i].feasible) ++violations;
        if (i && r[i].c < r[i - 1].c - 1e-9) ++violations;
        if (v.quantum && r[i].c > rows[CurveVariant{v.family, false}.name()][i].c + 1e-12) ++violations;
      }
    }
    auto at = [&](const char* name, std::size_t i) { return rows[name][i].c; };
    const std::size_t last = 201;
    ok &= at("cap-small-eps-classical", last) < at("cap-large-eps-classical", last) &&
          at("cap-small-eps-classical", last) < at("minfind-classical", last);
    ok &= at("minfind-quantum", last) < at("cap-small-eps-quantum", last) &&
          at("minfind-quantum", last) < at("cap-large-eps-quantum", last);
    ok &= at("cap-large-eps-classical", 0) < at("cap-small-eps-classical", 0) &&
          at("cap-large-eps-classical", 0) < at("minfind-classical", 0);
    ok &= at("cap-large-eps-quantum", 0) < at("cap-small-eps-quantum", 0) &&
          at("cap-large-eps-quantum", 0) < at("minfind-quantum", 0);
    return Outcome{ok && violations == 0, fmt::format("variants=6 rows=202 violations={}", violations)};
  });
}

Verdict check_minimizer(int per_variant, int grid, std::uint64_t seed) {
  return timed("cost", "minimizer-vs-scan", [&] {
    RngStream rng(seed, 0xc051);
    int checks = 0, ok = 0;
    double worst = 0.0;
    for (auto regime : {EpsRegime::kSmall, EpsRegime::kLarge})
      for (bool q : {false, true})
        for (int t = 0; t < per_variant; ++t) {
          const double b = kKissingExponent * rng.uniform();
          const double lo = regime == EpsRegime::kSmall ? small_eps_min_A(b) : 1e-9;
          double best = std::numeric_limits<double>::infinity();
          for (int i = 0; i <= grid; ++i)
            best = std::min(best, capping_cost(lo + (6.0 - lo) * i / grid, b, regime, q, CapPolicy::kOptimal));
          const double got = capping_exponent(b, regime, q).c;
          ++checks;
          ok += got <= best + 1e-9 && best - got <= 1e-6;
          worst = std::max(worst, std::abs(best - got));
        }
    return Outcome{ok == checks, fmt::format("checks={} within={} grid={} max_gap={:.2e}", checks, ok, grid, worst)};
  });
}

Verdict check_quantum_exponent() {
  return timed("cost", "quantum-exponent", [&] {
    const int n = 20;
    // Asymptotic per-query exponent A/2 = 0.161 from eps = 2^{-0.322 n}.
    const double eps = std::exp2(-0.322 * n);
    auto rep = quantum_cost_report(n, 3, kShiftedMinAlpha, eps);
    const double sum = rep.exponent_sum();
    const bool ok = std::abs(sum - 0.9535 * n) <= 0.02 * n && rep.quantum_queries == quantum_query_count(3, n);
    return Outcome{ok, fmt::format("n={} quantum_queries={} per_query={:.4f} exponent_sum={:.4f} target={:.4f}", n,
                                   rep.quantum_queries, rep.per_query_cost_exponent, sum, 0.9535 * n)};
  });
}

// ---- suites

std::vector<std::string> verify_suite_names() {
  return {"lattice", "gauss", "combiner", "smoothing", "bdd", "svp", "cost"};
}

std::vector<Verdict> run_verify_suite(const std::string& suite, const VerifyOptions& o) {
  if (suite == "all") {
    std::vector<Verdict> out;
    for (const auto& s : verify_suite_names()) {
      auto v = run_verify_suite(s, o);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
  const bool q = o.quick;
  const std::uint64_t seed = o.seed;
  const int w = o.workers;
  const LatticeBasis basis = o.basis ? *o.basis : LatticeBasis::identity(4);
  std::vector<Verdict> out;
  auto emit = [&](Verdict v) {
    if (o.on_verdict) o.on_verdict(v);
    out.push_back(std::move(v));
  };
  if (suite == "lattice") {
    emit(check_dual_pairing(q ? 20 : 100, seed));
    emit(check_enumeration_box_scan(q ? 12 : 60, seed));
    emit(check_lll_bound(q ? 20 : 100, seed));
    emit(check_coset_homomorphism(q ? 200 : 5000, seed));
  } else if (suite == "gauss") {
    emit(check_coset_uniformity({2, 3}, q ? 2 : 4, {0.5, 0.1}, q ? 100'000 : 1'000'000, seed, w));
    emit(check_coset_mass_ratio(20, seed));
    emit(check_convolution({0.5, 0.1}, q ? 50'000 : 400'000, seed, w));
    emit(check_scaled_smoothing(q ? 8 : 20, seed));
    emit(check_dual_smoothing_lambda(20, seed));
  } else if (suite == "combiner") {
    const int n = o.combiner_n;
    emit(check_combiner_distribution(n, o.combiner_q, q ? 20'000 : 100'000, seed, w));
    emit(check_combiner_coset_blind(n, o.combiner_q, seed));
    emit(check_leftover_hash(q ? 1000 : 4000, seed));
    emit(check_combiner_output_count(q ? 30 : 200, seed));
  } else if (suite == "smoothing") {
    emit(check_dense_inclusion(q ? 20 : 100, seed));
    emit(check_smoothing_rejection(q ? 30'000 : 200'000, seed));
  } else if (suite == "bdd") {
    emit(check_bdd_periodicity(basis, seed));
    emit(check_bdd_radius_monotone(basis, q ? 60 : 300, seed));
    emit(check_bdd_alpha_chain(q ? 8 : 20, seed));
    emit(check_bdd_oracle_reuse(basis, seed));
  } else if (suite == "svp") {
    emit(check_enumeration_completeness(q ? 12 : 50, 5, {2, 3}, seed, w));
    emit(check_shifted_min_exact(q ? 12 : 50, 6, seed, w));
    emit(check_caps_exact(q ? 8 : 50, 6, 60, seed, w));
    emit(check_shifted_min_gaussian(q ? 3 : 5, q ? 3 : 10, seed, w));
    emit(check_cap_success_rate(q ? 4 : 6, q ? 2000 : 10'000, seed, w));
    emit(check_svp_on_basis(basis, seed, w));
    emit(check_query_accounting());
  } else if (suite == "cost") {
    emit(check_cost_endpoints());
    emit(check_bdd_exponents());
    emit(check_cap_constants());
    emit(check_curve_shape(w));
    emit(check_minimizer(q ? 1 : 5, q ? 100'000 : 1'000'000, seed));
    emit(check_quantum_exponent());
  } else {
    throw ConfigError("unknown verify suite: " + suite);
  }
  return out;
}

}  // namespace lbdd
