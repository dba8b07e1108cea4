#include "core/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <spdlog/spdlog.h>
#include <unordered_map>

#include "core/errors.hpp"
#include "core/gauss.hpp"

namespace lbdd {

namespace {

// (Z mod q)^n addressed by mixed-radix index.
class LabelGroup {
 public:
  LabelGroup(int n, std::int64_t q) : n_(n), q_(q) {
    size_ = 1;
    for (int i = 0; i < n; ++i) {
      if (size_ > (std::uint64_t{1} << 40) / static_cast<std::uint64_t>(q))
        throw BudgetExceeded("label group too large");
      size_ *= static_cast<std::uint64_t>(q);
    }
  }

  std::uint64_t size() const { return size_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t out = 0, mul = 1;
    const auto uq = static_cast<std::uint64_t>(q_);
    for (int i = 0; i < n_; ++i) {
      out += ((a % uq + b % uq) % uq) * mul;
      a /= uq;
      b /= uq;
      mul *= uq;
    }
    return out;
  }

  std::uint64_t scale(std::uint64_t a, std::int64_t k) const {
    std::uint64_t out = 0, mul = 1;
    const auto uq = static_cast<std::uint64_t>(q_);
    const auto kk = static_cast<std::uint64_t>(((k % q_) + q_) % q_);
    for (int i = 0; i < n_; ++i) {
      out += ((a % uq) * kk % uq) * mul;
      a /= uq;
      mul *= uq;
    }
    return out;
  }

 private:
  int n_;
  std::int64_t q_;
  std::uint64_t size_;
};

// Chooses how many members k_j to take from each class so that sum k_j = w and
// sum k_j * label_j = target. Exact dynamic program over (count, group element).
std::optional<std::vector<int>> solve_class_counts(const LabelGroup& g,
                                                   const std::vector<std::uint64_t>& labels,
                                                   const std::vector<std::size_t>& sizes,
                                                   std::uint64_t target, int w) {
  const std::size_t m = labels.size();
  const std::uint64_t gs = g.size();
  const std::size_t layer = static_cast<std::size_t>(w + 1) * gs;
  if (static_cast<double>(m + 1) * static_cast<double>(layer) > 2e8)
    throw BudgetExceeded("tuple search table too large");
  std::vector<std::vector<char>> reach(m + 1, std::vector<char>(layer, 0));
  auto at = [&](std::size_t t, std::uint64_t s) { return t * gs + s; };
  reach[0][at(0, 0)] = 1;
  std::vector<std::uint64_t> mult(w + 1);
  for (std::size_t j = 0; j < m; ++j) {
    for (int k = 0; k <= w; ++k) mult[k] = g.scale(labels[j], k);
    const auto& prev = reach[j];
    auto& next = reach[j + 1];
    for (int t = 0; t <= w; ++t) {
      for (std::uint64_t s = 0; s < gs; ++s) {
        if (!prev[at(t, s)]) continue;
        const int kmax = static_cast<int>(std::min<std::size_t>(sizes[j], w - t));
        for (int k = 0; k <= kmax; ++k) next[at(t + k, g.add(s, mult[k]))] = 1;
      }
    }
  }
  if (!reach[m][at(w, target)]) return std::nullopt;
  std::vector<int> counts(m, 0);
  int t = w;
  std::uint64_t s = target;
  for (std::size_t j = m; j-- > 0;) {
    for (int k = 0; k <= w; ++k) mult[k] = g.scale(labels[j], k);
    const int kmax = static_cast<int>(std::min<std::size_t>(sizes[j], t));
    bool found = false;
    for (int k = 0; k <= kmax && !found; ++k) {
      const std::uint64_t prev_s = g.add(s, g.scale(mult[k], -1));
      if (reach[j][at(t - k, prev_s)]) {
        counts[j] = k;
        t -= k;
        s = prev_s;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::kInfeasible, "tuple search backtrack failed");
  }
  return counts;
}

std::uint64_t pow_ceil(double x) { return static_cast<std::uint64_t>(std::ceil(x - 1e-9)); }

// Live L2 points grouped by label, with O(1) removal.
class LabelIndex {
 public:
  LabelIndex(std::vector<std::uint64_t> labels) : labels_(std::move(labels)) {
    const std::size_t m = labels_.size();
    alive_.resize(m);
    alive_pos_.resize(m);
    bucket_pos_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      alive_[i] = i;
      alive_pos_[i] = i;
      auto& b = buckets_[labels_[i]];
      bucket_pos_[i] = b.size();
      b.push_back(i);
    }
  }

  std::size_t alive() const { return alive_.size(); }
  std::size_t alive_at(std::size_t pos) const { return alive_[pos]; }
  std::uint64_t label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::size_t>* bucket(std::uint64_t label) const {
    auto it = buckets_.find(label);
    return it == buckets_.end() || it->second.empty() ? nullptr : &it->second;
  }
  // Nonempty classes in increasing label order.
  std::vector<std::uint64_t> classes() const {
    std::vector<std::uint64_t> out;
    for (const auto& [l, b] : buckets_)
      if (!b.empty()) out.push_back(l);
    std::sort(out.begin(), out.end());
    return out;
  }

  void remove(std::size_t i) {
    const std::size_t ap = alive_pos_[i];
    alive_[ap] = alive_.back();
    alive_pos_[alive_[ap]] = ap;
    alive_.pop_back();
    auto& b = buckets_[labels_[i]];
    const std::size_t bp = bucket_pos_[i];
    b[bp] = b.back();
    bucket_pos_[b[bp]] = bp;
    b.pop_back();
  }

 private:
  std::vector<std::uint64_t> labels_;
  std::vector<std::size_t> alive_;
  std::vector<std::size_t> alive_pos_;
  std::vector<std::size_t> bucket_pos_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

constexpr int kProbeAttempts = 4;

// Random probe: w-1 uniformly chosen live points, the last one looked up by
// the label that closes the sum. Empty result when the probe fails.
std::vector<std::size_t> probe_tuple(const LabelIndex& idx, const LabelGroup& g,
                                     std::uint64_t target, int w, RngStream& rng) {
  std::vector<std::size_t> chosen;
  chosen.reserve(w);
  const auto last = static_cast<std::int64_t>(idx.alive()) - 1;
  std::uint64_t sum = 0;
  while (static_cast<int>(chosen.size()) < w - 1) {
    const std::size_t i = idx.alive_at(static_cast<std::size_t>(rng.uniform_int(0, last)));
    if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
    chosen.push_back(i);
    sum = g.add(sum, idx.label(i));
  }
  const std::uint64_t need = g.add(target, g.scale(sum, -1));
  const auto* bucket = idx.bucket(need);
  if (!bucket) return {};
  std::size_t taken = 0;
  for (auto i : chosen) taken += idx.label(i) == need;
  if (bucket->size() <= taken) return {};
  const auto top = static_cast<std::int64_t>(bucket->size()) - 1;
  for (;;) {
    const std::size_t i = (*bucket)[static_cast<std::size_t>(rng.uniform_int(0, top))];
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
      chosen.push_back(i);
      return chosen;
    }
  }
}

std::vector<std::size_t> exact_tuple(const LabelIndex& idx, const LabelGroup& g,
                                     std::uint64_t target, int w, RngStream& rng) {
  const auto classes = idx.classes();
  std::vector<std::size_t> sizes;
  for (auto l : classes) sizes.push_back(idx.bucket(l)->size());
  auto counts = solve_class_counts(g, classes, sizes, target, w);
  if (!counts) return {};
  std::vector<std::size_t> chosen;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    if ((*counts)[j] == 0) continue;
    auto members = *idx.bucket(classes[j]);
    // Partial Fisher-Yates: first k entries become a uniform k-subset.
    for (int k = 0; k < (*counts)[j]; ++k) {
      const auto r = rng.uniform_int(k, static_cast<std::int64_t>(members.size()) - 1);
      std::swap(members[k], members[static_cast<std::size_t>(r)]);
      chosen.push_back(members[k]);
    }
  }
  return chosen;
}

}  // namespace

double CombinerConfig::coset_factor(int n) const {
  return std::pow(static_cast<double>(q), static_cast<double>(n) / d);
}

std::uint64_t CombinerConfig::input_count(int n) const {
  return pow_ceil(160.0 * d * d * static_cast<double>(C) * coset_factor(n));
}

std::uint64_t CombinerConfig::target_outputs(int n) const {
  return pow_ceil(static_cast<double>(C) * coset_factor(n));
}

double CombinerConfig::width_out(double s) const {
  return s * std::sqrt(static_cast<double>(w() + 1)) / static_cast<double>(q);
}

double CombinerConfig::closeness(int n) const {
  const double qq = static_cast<double>(q);
  return 4.0 * std::pow(eps, 2.0 * d) * static_cast<double>(input_count(n)) +
         11.0 * static_cast<double>(C) * std::pow(qq, -2.5 * n);
}

CombineResult combine_batch(const GaussianBatch& input, const CombinerConfig& cfg, RngStream& rng,
                            const LatticeBasis* basis, bool audit) {
  const int n = input.n;
  const int w = cfg.w();
  if (cfg.q < 2) throw ConfigError("combiner modulus must be >= 2");
  if (w < 1) throw ConfigError("tuple size must be positive");
  const std::uint64_t N = cfg.input_count(n);
  if (input.size() < N)
    throw InsufficientInput("combiner needs " + std::to_string(N) + " inputs, got " +
                            std::to_string(input.size()));
  if (basis && n <= 6) {
    const double eta = smoothing_parameter(*basis, cfg.eps).s_hi;
    const double need = 2.0 * std::sqrt(static_cast<double>(cfg.d)) * cfg.q * eta;
    if (input.width < need * (1.0 - 1e-9))
      throw WidthTooSmall("combiner input width " + std::to_string(input.width) +
                          " below 2 sqrt(d) q eta = " + std::to_string(need));
  }

  const std::size_t half = N / 2;
  const LabelGroup g(n, cfg.q);
  std::vector<std::uint64_t> l2_labels(half);
  for (std::size_t i = 0; i < half; ++i)
    l2_labels[i] = coset_label(input.points[half + i], cfg.q).index();
  LabelIndex idx(std::move(l2_labels));

  CombineResult res;
  res.target = cfg.target_outputs(n);
  res.batch.n = n;
  res.batch.q = cfg.q;
  res.batch.width = cfg.width_out(input.width);
  res.batch.stream_id = input.stream_id;
  res.batch.config = input.config;
  res.batch.claimed_closeness = std::min(1.0, input.claimed_closeness + cfg.closeness(n));
  res.batch.points.reserve(res.target);

  for (std::size_t v = 0; v < half && res.batch.points.size() < res.target; ++v) {
    if (idx.alive() < static_cast<std::size_t>(w)) break;
    const std::uint64_t target = coset_label(input.points[v], cfg.q).index();
    std::vector<std::size_t> tuple;
    for (int a = 0; a < kProbeAttempts && tuple.empty(); ++a)
      tuple = probe_tuple(idx, g, target, w, rng);
    if (tuple.empty()) {
      tuple = exact_tuple(idx, g, target, w, rng);
      if (tuple.empty()) continue;
      ++res.fallback_matches;
    }
    std::sort(tuple.begin(), tuple.end());
    IntVector sum = input.points[v].coeffs;
    for (auto& x : sum) x = -x;
    for (auto i : tuple) {
      const auto& c = input.points[half + i].coeffs;
      for (int k = 0; k < n; ++k) sum[k] += c[k];
      idx.remove(i);
    }
    for (auto& x : sum) {
      if (x % cfg.q != 0) throw Error(ErrorCode::kInfeasible, "combined sum not in qL");
      x /= cfg.q;
    }
    if (audit) {
      AuditEntry e;
      e.anchor = v;
      for (auto i : tuple) e.tuple.push_back(half + i);
      e.output = LatticePoint{sum};
      res.audit.push_back(std::move(e));
    }
    res.batch.points.push_back(LatticePoint{std::move(sum)});
  }
  res.starved = res.batch.points.size() < res.target;
  if (res.starved)
    spdlog::debug("combiner starved: {} of {} outputs", res.batch.points.size(), res.target);
  return res;
}

std::optional<std::vector<std::size_t>> find_matching_tuple(std::span<const CosetLabel> labels,
                                                            const CosetLabel& target, int w) {
  if (w < 1 || labels.size() < static_cast<std::size_t>(w)) return std::nullopt;
  const int n = static_cast<int>(target.residues.size());
  const LabelGroup g(n, target.modulus);
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  for (std::size_t i = 0; i < labels.size(); ++i) order.emplace_back(labels[i].index(), i);
  std::sort(order.begin(), order.end());
  std::vector<std::uint64_t> classes;
  std::vector<std::size_t> sizes, starts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (classes.empty() || classes.back() != order[i].first) {
      classes.push_back(order[i].first);
      sizes.push_back(0);
      starts.push_back(i);
    }
    ++sizes.back();
  }
  auto counts = solve_class_counts(g, classes, sizes, target.index(), w);
  if (!counts) return std::nullopt;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < classes.size(); ++j)
    for (int k = 0; k < (*counts)[j]; ++k) out.push_back(order[starts[j] + k].second);
  std::sort(out.begin(), out.end());
  return out;
}

GaussianBatch filter_sublattice(const GaussianBatch& input, std::int64_t p) {
  if (p < 1) throw ConfigError("filter modulus must be positive");
  GaussianBatch out = input;
  out.points.clear();
  out.width = input.width / static_cast<double>(p);
  for (const auto& pt : input.points) {
    if (std::all_of(pt.coeffs.begin(), pt.coeffs.end(), [&](auto c) { return c % p == 0; })) {
      LatticePoint q = pt;
      for (auto& c : q.coeffs) c /= p;
      out.points.push_back(std::move(q));
    }
  }
  return out;
}

bool audit_holds(const GaussianBatch& input, const CombineResult& result) {
  const std::int64_t q = result.batch.q;
  std::vector<char> used(input.size(), 0);
  for (const auto& e : result.audit) {
    IntVector rhs = input.points[e.anchor].coeffs;
    for (auto& x : rhs) x = -x;
    if (used[e.anchor]++) return false;
    for (auto i : e.tuple) {
      if (used[i]++) return false;
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += input.points[i].coeffs[k];
    }
    for (std::size_t k = 0; k < rhs.size(); ++k)
      if (q * e.output.coeffs[k] != rhs[k]) return false;
  }
  return true;
}

namespace {
void put_coeffs(std::ostream& os, const IntVector& v) {
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
}
}  // namespace

void write_audit(std::ostream& os, const GaussianBatch& input, const CombineResult& result,
                 std::uint64_t call, int level) {
  const std::int64_t q = result.batch.q;
  for (const auto& e : result.audit) {
    const IntVector& v = input.points[e.anchor].coeffs;
    IntVector sum(v.size(), 0);
    for (auto i : e.tuple)
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += input.points[i].coeffs[k];
    bool holds = true;
    for (std::size_t k = 0; k < sum.size(); ++k) holds = holds && q * e.output.coeffs[k] == sum[k] - v[k];
    os << "ledger call=" << call << " level=" << level << " q=" << q << " v=";
    put_coeffs(os, v);
    os << " sum=";
    put_coeffs(os, sum);
    os << " o=";
    put_coeffs(os, e.output.coeffs);
    os << " holds=" << (holds ? 1 : 0) << "\n";
  }
}

double PipelineConfig::start_width() const {
  return std::pow(alpha, k) * static_cast<double>(p) * s;
}

CombinerConfig PipelineConfig::combiner() const {
  CombinerConfig c;
  c.q = q;
  c.d = d;
  c.C = C;
  c.tuple_size = tuple_size;
  c.eps = eps;
  return c;
}

PipelineConfig make_pipeline_config(const LatticeBasis& basis, std::int64_t q, double s,
                                    int forced_rounds) {
  if (q < 4) throw ConfigError("pipeline modulus must be >= 4");
  if (!(s > 0)) throw ConfigError("pipeline width must be positive");
  PipelineConfig cfg;
  cfg.q = q;
  cfg.n = basis.rank();
  cfg.s = s;
  const double qd = static_cast<double>(q);
  cfg.d = static_cast<int>((q * q + 15) / 16);
  cfg.alpha = qd / std::sqrt(8.0 * cfg.d + 1.0);
  cfg.p = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(cfg.d)) * qd - 1e-9));
  cfg.eps = std::pow(qd, -32.0 * cfg.n / (qd * qd));
  if (qd > std::sqrt(static_cast<double>(cfg.n)))
    spdlog::debug("pipeline: q = {} exceeds sqrt(n) = {:.3f}; running outside the asymptotic range", q,
                 std::sqrt(static_cast<double>(cfg.n)));
  if (forced_rounds >= 0) {
    cfg.k = forced_rounds;
  } else {
    const double need = KleinSampler::min_width(lll_reduce(basis).basis);
    cfg.k = 0;
    while (cfg.start_width() < need) ++cfg.k;
  }
  return cfg;
}

namespace {

class PipelineRunner {
 public:
  PipelineRunner(const LatticeBasis& basis, const PipelineConfig& cfg, RngStream& rng, bool audit,
                 std::ostream* ledger)
      : cfg_(cfg),
        comb_(cfg.combiner()),
        klein_(basis, cfg.start_width()),
        rng_(rng),
        audit_(audit || ledger),
        ledger_(ledger),
        n_(basis.rank()) {}

  // Points at width start_width / alpha^level.
  std::vector<LatticePoint> produce(int level, std::uint64_t count) {
    std::vector<LatticePoint> out;
    out.reserve(count);
    if (level == 0) {
      for (std::uint64_t i = 0; i < count; ++i) out.push_back(klein_.sample(rng_));
      stats.klein_samples += count;
      grow(count);
      return out;
    }
    const std::uint64_t N = comb_.input_count(n_);
    while (out.size() < count) {
      GaussianBatch in;
      in.n = n_;
      in.width = cfg_.start_width() / std::pow(cfg_.alpha, level - 1);
      in.points = produce(level - 1, N);
      auto res = combine_batch(in, comb_, rng_, nullptr, audit_);
      ++stats.combine_calls;
      closeness += comb_.closeness(n_);
      if (res.starved) ++stats.starved_calls;
      if (audit_) {
        stats.audited += res.audit.size();
        stats.audit_ok = stats.audit_ok && audit_holds(in, res);
        if (ledger_) write_audit(*ledger_, in, res, stats.combine_calls, level);
      }
      shrink(in.points.size());
      for (auto& p : res.batch.points) {
        if (out.size() >= count) break;
        out.push_back(std::move(p));
        grow(1);
      }
    }
    return out;
  }

  void grow(std::uint64_t k) {
    live_ += k;
    stats.peak_live = std::max(stats.peak_live, live_);
  }
  void shrink(std::uint64_t k) { live_ -= k; }

  PipelineStats stats;
  double closeness = 0.0;

 private:
  const PipelineConfig& cfg_;
  CombinerConfig comb_;
  KleinSampler klein_;
  RngStream& rng_;
  bool audit_;
  std::ostream* ledger_;
  int n_;
  std::uint64_t live_ = 0;
};

}  // namespace

PipelineResult dgs_pipeline(const LatticeBasis& basis, const PipelineConfig& cfg,
                            std::uint64_t count, RngStream& rng, bool audit, bool check_width,
                            std::ostream* ledger) {
  if (check_width && cfg.n <= 6) {
    const double eta = smoothing_parameter(basis, cfg.eps).s_hi;
    if (cfg.s < eta * (1.0 - 1e-9))
      throw WidthTooSmall("pipeline width " + std::to_string(cfg.s) + " below eta_eps = " +
                          std::to_string(eta));
  }
  PipelineRunner runner(basis, cfg, rng, audit, ledger);
  PipelineResult res;
  res.batch.n = cfg.n;
  res.batch.q = cfg.q;
  res.batch.width = cfg.s;
  res.batch.stream_id = rng.stream_id();
  const std::uint64_t chunk = std::max<std::uint64_t>(cfg.combiner().input_count(cfg.n), 1024);
  while (res.batch.points.size() < count) {
    GaussianBatch top;
    top.n = cfg.n;
    top.width = cfg.start_width() / std::pow(cfg.alpha, cfg.k);
    top.points = runner.produce(cfg.k, chunk);
    auto kept = filter_sublattice(top, cfg.p);
    runner.stats.filtered_in += top.points.size();
    runner.stats.kept += kept.points.size();
    runner.shrink(top.points.size());
    for (auto& p : kept.points) {
      if (res.batch.points.size() >= count) break;
      res.batch.points.push_back(std::move(p));
    }
  }
  res.batch.claimed_closeness = std::min(1.0, runner.closeness);
  res.stats = runner.stats;
  return res;
}

}  // namespace lbdd
