#include "latticebdd/latticebdd.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "core/bdd.hpp"
#include "core/combiner.hpp"
#include "core/cost.hpp"
#include "core/dense.hpp"
#include "core/errors.hpp"
#include "core/gauss.hpp"
#include "core/log.hpp"
#include "core/parallel.hpp"
#include "core/svp.hpp"
#include "core/verify.hpp"

struct lbdd_basis {
  lbdd::LatticeBasis b;
};
struct lbdd_batch {
  lbdd::GaussianBatch b;
};
struct lbdd_oracle {
  std::shared_ptr<const lbdd::BddOracle> o;
};

namespace {

using namespace lbdd;

thread_local std::string g_last_error;

lbdd_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::kSingularBasis: return LBDD_E_SINGULAR_BASIS;
    case ErrorCode::kBudgetExceeded: return LBDD_E_BUDGET;
    case ErrorCode::kWidthTooSmall: return LBDD_E_WIDTH;
    case ErrorCode::kInsufficientInput: return LBDD_E_INSUFFICIENT_INPUT;
    case ErrorCode::kNotConverged: return LBDD_E_NOT_CONVERGED;
    case ErrorCode::kOutOfDomain: return LBDD_E_OUT_OF_DOMAIN;
    case ErrorCode::kInfeasible: return LBDD_E_INFEASIBLE;
    case ErrorCode::kConfig: return LBDD_E_CONFIG;
    case ErrorCode::kIo: return LBDD_E_IO;
    case ErrorCode::kParse: return LBDD_E_PARSE;
  }
  return LBDD_E_INTERNAL;
}

lbdd_status fail(lbdd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
lbdd_status guarded(F&& f) {
  init_logging();
  try {
    f();
    return LBDD_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LBDD_E_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return fail(LBDD_E_INTERNAL, e.what());
  } catch (...) {
    return fail(LBDD_E_INTERNAL, "unknown error");
  }
}

#define LBDD_REQUIRE(cond)                                              \
  do {                                                                  \
    if (!(cond)) return fail(LBDD_E_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

std::ofstream open_ledger(const char* path) {
  std::ofstream os(path);
  if (!os) throw IoError(std::string("cannot open ") + path);
  return os;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

BddOptions bdd_options(const lbdd_bdd_options* o) {
  BddOptions b;
  if (!o) return b;
  b.sample_constant = o->sample_constant;
  b.conservative_slack = o->conservative_slack;
  b.min_eps = o->min_eps;
  b.max_eps = o->max_eps;
  b.max_samples = o->max_samples;
  return b;
}

SolverOptions solver_options(const lbdd_svp_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.decoder = o->decoder == LBDD_DECODER_GAUSSIAN ? DecoderKind::kGaussian : DecoderKind::kExact;
  s.workers = o->workers > 0 ? o->workers : 1;
  s.node_budget = o->node_budget;
  s.bdd.sample_constant = o->sample_constant;
  s.bdd.conservative_slack = o->conservative_slack;
  s.full_grid_max_n = o->full_grid_max_n;
  s.subsample_queries = o->subsample_queries;
  s.stop_on_success = o->stop_on_success != 0;
  s.cap_policy = o->cap_policy == LBDD_CAP_OPTIMAL ? CapRadiusPolicy::kOptimal : CapRadiusPolicy::kAlpha;
  return s;
}

void fill_report(const SolverRun& r, lbdd_svp_report* out, std::int64_t* best) {
  if (out) {
    out->seed = r.seed;
    out->queries = r.queries_made;
    out->candidates = r.candidates_seen;
    out->declined = r.declined;
    out->best_norm = r.best_norm;
    out->lambda1_oracle = r.lambda1_oracle;
    out->success = r.success;
    out->certifying = r.certifying;
    out->p = r.p;
    out->alpha = r.alpha;
    out->eps = r.eps;
    out->levels = r.levels.size();
    out->targets = 0;
    for (const auto& l : r.levels) out->targets += l.targets;
  }
  if (best)
    for (std::size_t i = 0; i < r.best.coeffs.size(); ++i) best[i] = r.best.coeffs[i];
}

void fill_quantum(const QuantumCostReport& q, lbdd_quantum_report* out) {
  if (!out) return;
  out->n = q.n;
  out->p = q.p;
  out->alpha = q.alpha;
  out->eps = q.eps;
  out->classical_queries = q.classical_queries;
  out->quantum_queries = q.quantum_queries;
  out->per_query_cost_exponent = q.per_query_cost_exponent;
  out->exponent_sum = q.exponent_sum();
}

CapPolicy cap_policy(const char* policy) {
  if (!policy || std::strcmp(policy, "optimal") == 0) return CapPolicy::kOptimal;
  // "paper" is accepted as an alias of "alpha".
  if (std::strcmp(policy, "alpha") == 0 || std::strcmp(policy, "paper") == 0) return CapPolicy::kAlpha;
  throw ConfigError(std::string("unknown cap policy: ") + policy);
}

}  // namespace

extern "C" {

const char* lbdd_version(void) { return "0.1.0"; }

const char* lbdd_module_versions(void) {
  return "lattice-core=0.1.0 gauss-sampler=0.1.0 dgs-combiner=0.1.0 smoothing-dense=0.1.0 "
         "bdd-oracle=0.1.0 svp-solvers=0.1.0 cost-model=0.1.0 cli-harness=0.1.0";
}

const char* lbdd_status_name(lbdd_status s) {
  switch (s) {
    case LBDD_OK: return "ok";
    case LBDD_E_SINGULAR_BASIS: return "singular_basis";
    case LBDD_E_BUDGET: return "budget_exceeded";
    case LBDD_E_WIDTH: return "width_too_small";
    case LBDD_E_INSUFFICIENT_INPUT: return "insufficient_input";
    case LBDD_E_NOT_CONVERGED: return "not_converged";
    case LBDD_E_OUT_OF_DOMAIN: return "out_of_domain";
    case LBDD_E_INFEASIBLE: return "infeasible";
    case LBDD_E_CONFIG: return "config_error";
    case LBDD_E_IO: return "io_error";
    case LBDD_E_PARSE: return "parse_error";
    case LBDD_E_INVALID_ARGUMENT: return "invalid_argument";
    case LBDD_E_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* lbdd_last_error(void) { return g_last_error.c_str(); }

void lbdd_string_free(char* s) { std::free(s); }

// ---- bases

lbdd_status lbdd_basis_load(const char* path, lbdd_basis** out) {
  LBDD_REQUIRE(path && out);
  return guarded([&] { *out = new lbdd_basis{load_basis(path)}; });
}

lbdd_status lbdd_basis_parse(const char* text, lbdd_basis** out) {
  LBDD_REQUIRE(text && out);
  return guarded([&] { *out = new lbdd_basis{parse_basis(text)}; });
}

lbdd_status lbdd_basis_identity(int n, lbdd_basis** out) {
  LBDD_REQUIRE(n >= 1 && out);
  return guarded([&] { *out = new lbdd_basis{LatticeBasis::identity(n)}; });
}

void lbdd_basis_free(lbdd_basis* basis) { delete basis; }

int lbdd_basis_rank(const lbdd_basis* basis) { return basis ? basis->b.rank() : 0; }

lbdd_status lbdd_basis_format(const lbdd_basis* basis, char** text) {
  LBDD_REQUIRE(basis && text);
  return guarded([&] { *text = dup_string(format_basis(basis->b)); });
}

lbdd_status lbdd_basis_lambda1(const lbdd_basis* basis, uint64_t node_budget, double* lambda1) {
  LBDD_REQUIRE(basis && lambda1);
  return guarded([&] {
    *lambda1 = LatticeEnumerator(basis->b, node_budget ? node_budget : kDefaultNodeBudget).lambda1();
  });
}

lbdd_status lbdd_smoothing_parameter(const lbdd_basis* basis, double eps, double* s_lo, double* s_hi) {
  LBDD_REQUIRE(basis && eps > 0 && eps < 1);
  return guarded([&] {
    auto e = smoothing_parameter(basis->b, eps);
    if (s_lo) *s_lo = e.s_lo;
    if (s_hi) *s_hi = e.s_hi;
  });
}

// ---- batches

lbdd_status lbdd_batch_load(const char* path, lbdd_batch** out) {
  LBDD_REQUIRE(path && out);
  return guarded([&] { *out = new lbdd_batch{load_batch(path)}; });
}

lbdd_status lbdd_batch_save(const lbdd_batch* batch, const char* path) {
  LBDD_REQUIRE(batch && path);
  return guarded([&] { save_batch(path, batch->b); });
}

void lbdd_batch_free(lbdd_batch* batch) { delete batch; }

size_t lbdd_batch_size(const lbdd_batch* batch) { return batch ? batch->b.size() : 0; }

int lbdd_batch_rank(const lbdd_batch* batch) { return batch ? batch->b.n : 0; }

double lbdd_batch_width(const lbdd_batch* batch) { return batch ? batch->b.width : 0.0; }

double lbdd_batch_closeness(const lbdd_batch* batch) { return batch ? batch->b.claimed_closeness : 0.0; }

lbdd_status lbdd_batch_point(const lbdd_batch* batch, size_t i, int64_t* coeffs) {
  LBDD_REQUIRE(batch && coeffs && i < batch->b.size());
  const auto& p = batch->b.points[i].coeffs;
  for (std::size_t k = 0; k < p.size(); ++k) coeffs[k] = p[k];
  return LBDD_OK;
}

lbdd_status lbdd_batch_add_config(lbdd_batch* batch, const char* line) {
  LBDD_REQUIRE(batch && line);
  return guarded([&] { batch->b.config.emplace_back(line); });
}

lbdd_status lbdd_sample(const lbdd_basis* basis, double s, uint64_t count, lbdd_sampler kind, uint64_t seed,
                        int workers, uint64_t node_budget, lbdd_batch** out) {
  LBDD_REQUIRE(basis && out && s > 0);
  return guarded([&] {
    const auto& b = basis->b;
    std::unique_ptr<ExactSampler> exact;
    std::unique_ptr<KleinSampler> klein;
    if (kind == LBDD_SAMPLER_KLEIN)
      klein = std::make_unique<KleinSampler>(b, s);
    else
      exact = std::make_unique<ExactSampler>(b, s, std::span<const double>{},
                                             node_budget ? node_budget : kDefaultNodeBudget);
    RngStream rng(seed, 0);
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
    using Acc = std::vector<std::pair<std::uint64_t, std::vector<LatticePoint>>>;
    auto parts = parallel_reduce(
        chunks, workers > 0 ? workers : 1, Acc{},
        [&](Acc& acc, std::uint64_t c) {
          RngStream r = rng.split(c);
          std::vector<LatticePoint> pts;
          const std::uint64_t hi = std::min<std::uint64_t>(count, (c + 1) * kChunk);
          for (std::uint64_t i = c * kChunk; i < hi; ++i) pts.push_back(klein ? klein->sample(r) : exact->sample(r));
          acc.emplace_back(c, std::move(pts));
        },
        [](Acc& a, Acc&& x) { a.insert(a.end(), std::make_move_iterator(x.begin()), std::make_move_iterator(x.end())); });
    std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    auto res = std::make_unique<lbdd_batch>();
    res->b.n = b.rank();
    res->b.width = s;
    res->b.stream_id = 0;
    res->b.points.reserve(count);
    for (auto& [c, pts] : parts)
      for (auto& p : pts) res->b.points.push_back(std::move(p));
    *out = res.release();
  });
}

lbdd_status lbdd_sample_smoothing(const lbdd_basis* basis, double s, uint64_t count, uint64_t seed,
                                  lbdd_batch** out, lbdd_smoothing_stats* stats) {
  LBDD_REQUIRE(basis && out && s > 0);
  return guarded([&] {
    RngStream rng(seed, 0);
    SmoothingSampleStats st;
    auto batch = sample_at_smoothing(basis->b, s, count, rng, &st);
    if (stats) *stats = {st.rounds, st.drawn, st.kept, st.distinct_subspaces};
    *out = new lbdd_batch{std::move(batch)};
  });
}

void lbdd_combine_options_init(lbdd_combine_options* opts) {
  if (!opts) return;
  opts->q = 2;
  opts->d = 1;
  opts->C = 1;
  opts->tuple_size = 0;
  opts->audit = 0;
  opts->audit_path = nullptr;
}

lbdd_status lbdd_combine(const lbdd_batch* input, const lbdd_basis* basis, const lbdd_combine_options* opts,
                         uint64_t seed, lbdd_batch** out, lbdd_combine_report* report) {
  LBDD_REQUIRE(input && opts && out);
  return guarded([&] {
    CombinerConfig cfg;
    cfg.q = opts->q;
    cfg.d = opts->d;
    cfg.C = opts->C;
    cfg.tuple_size = opts->tuple_size;
    RngStream rng(seed, 0);
    const bool audit = opts->audit != 0 || opts->audit_path;
    auto res = combine_batch(input->b, cfg, rng, basis ? &basis->b : nullptr, audit);
    if (opts->audit_path) {
      auto os = open_ledger(opts->audit_path);
      write_audit(os, input->b, res, 0, 1);
    }
    if (report) {
      report->inputs = input->b.size();
      report->outputs = res.batch.size();
      report->target = res.target;
      report->starved = res.starved;
      report->fallback_matches = res.fallback_matches;
      report->audited = res.audit.size();
      report->audit_ok = audit ? audit_holds(input->b, res) : 1;
      report->width_out = res.batch.width;
      report->closeness = res.batch.claimed_closeness;
    }
    *out = new lbdd_batch{std::move(res.batch)};
  });
}

void lbdd_pipeline_options_init(lbdd_pipeline_options* opts) {
  if (!opts) return;
  opts->q = 4;
  opts->s = 0.0;
  opts->forced_rounds = -1;
  opts->tuple_size = 0;
  opts->audit = 0;
  opts->audit_path = nullptr;
  opts->check_width = 1;
}

lbdd_status lbdd_pipeline(const lbdd_basis* basis, const lbdd_pipeline_options* opts, uint64_t count, uint64_t seed,
                          lbdd_batch** out, lbdd_pipeline_report* report) {
  LBDD_REQUIRE(basis && opts && out && opts->s > 0);
  return guarded([&] {
    auto cfg = make_pipeline_config(basis->b, opts->q, opts->s, opts->forced_rounds);
    cfg.tuple_size = opts->tuple_size;
    RngStream rng(seed, 0);
    std::ofstream ledger;
    if (opts->audit_path) ledger = open_ledger(opts->audit_path);
    auto res = dgs_pipeline(basis->b, cfg, count, rng, opts->audit != 0, opts->check_width != 0,
                            opts->audit_path ? &ledger : nullptr);
    if (ledger.is_open() && !ledger.flush()) throw IoError(std::string("cannot write ") + opts->audit_path);
    if (report) {
      report->q = cfg.q;
      report->d = cfg.d;
      report->k = cfg.k;
      report->p = cfg.p;
      report->eps = cfg.eps;
      report->alpha = cfg.alpha;
      report->start_width = cfg.start_width();
      const auto& st = res.stats;
      report->klein_samples = st.klein_samples;
      report->combine_calls = st.combine_calls;
      report->starved_calls = st.starved_calls;
      report->filtered_in = st.filtered_in;
      report->kept = st.kept;
      report->peak_live = st.peak_live;
      report->audited = st.audited;
      report->audit_ok = st.audit_ok;
    }
    *out = new lbdd_batch{std::move(res.batch)};
  });
}

// ---- BDD

void lbdd_bdd_options_init(lbdd_bdd_options* opts) {
  if (!opts) return;
  BddOptions d;
  opts->eps = 1e-3;
  opts->sample_constant = d.sample_constant;
  opts->conservative_slack = d.conservative_slack;
  opts->min_eps = d.min_eps;
  opts->max_eps = d.max_eps;
  opts->max_samples = d.max_samples;
}

lbdd_status lbdd_oracle_build(const lbdd_basis* basis, const lbdd_bdd_options* opts, uint64_t seed,
                              lbdd_oracle** out) {
  LBDD_REQUIRE(basis && opts && out);
  return guarded([&] {
    RngStream rng(seed, 0);
    auto o = std::make_shared<const BddOracle>(build_bdd_oracle(basis->b, opts->eps, rng, bdd_options(opts)));
    *out = new lbdd_oracle{std::move(o)};
  });
}

lbdd_status lbdd_oracle_build_pipeline(const lbdd_basis* basis, const lbdd_bdd_options* opts, int64_t q,
                                       uint64_t seed, lbdd_oracle** out) {
  LBDD_REQUIRE(basis && opts && out);
  return guarded([&] {
    RngStream rng(seed, 0);
    auto o = std::make_shared<const BddOracle>(
        build_bdd_oracle_via_pipeline(basis->b, opts->eps, q, rng, bdd_options(opts)));
    *out = new lbdd_oracle{std::move(o)};
  });
}

lbdd_status lbdd_oracle_save(const lbdd_oracle* oracle, const char* path) {
  LBDD_REQUIRE(oracle && path);
  return guarded([&] { save_oracle(path, *oracle->o); });
}

lbdd_status lbdd_oracle_load(const char* path, lbdd_oracle** out) {
  LBDD_REQUIRE(path && out);
  return guarded([&] { *out = new lbdd_oracle{std::make_shared<const BddOracle>(load_oracle(path))}; });
}

void lbdd_oracle_free(lbdd_oracle* oracle) { delete oracle; }

lbdd_status lbdd_oracle_info_get(const lbdd_oracle* oracle, lbdd_oracle_info* info) {
  LBDD_REQUIRE(oracle && info);
  const auto& o = *oracle->o;
  info->n = o.basis.rank();
  info->eps = o.eps;
  info->requested_eps = o.requested_eps;
  info->alpha = o.alpha;
  info->phi = o.phi;
  info->lambda1 = o.lambda1;
  info->m = o.m;
  info->distinct = o.multiplicity.size();
  info->dual_width = o.dual_width;
  info->sample_constant = o.sample_constant;
  info->conservative_slack = o.conservative_slack;
  return LBDD_OK;
}

lbdd_status lbdd_oracle_decode(const lbdd_oracle* oracle, const double* target, int64_t* coeffs,
                               lbdd_query_report* report) {
  LBDD_REQUIRE(oracle && target && coeffs);
  return guarded([&] {
    const int n = oracle->o->basis.rank();
    BddQueryReport rep;
    try {
      auto p = bdd_decode(*oracle->o, std::span<const double>(target, n), &rep);
      for (int i = 0; i < n; ++i) coeffs[i] = p.coeffs[i];
    } catch (...) {
      if (report) *report = {rep.estimator_calls, rep.ascent_steps, rep.converged, rep.residual};
      throw;
    }
    if (report) *report = {rep.estimator_calls, rep.ascent_steps, rep.converged, rep.residual};
  });
}

lbdd_status lbdd_exact_bdd(const lbdd_basis* basis, const double* target, uint64_t node_budget, int64_t* coeffs) {
  LBDD_REQUIRE(basis && target && coeffs);
  return guarded([&] {
    const int n = basis->b.rank();
    auto p = exact_bdd(basis->b, std::span<const double>(target, n), node_budget ? node_budget : kDefaultNodeBudget);
    for (int i = 0; i < n; ++i) coeffs[i] = p.coeffs[i];
  });
}

// ---- SVP

void lbdd_svp_options_init(lbdd_svp_options* opts) {
  if (!opts) return;
  SolverOptions d;
  opts->decoder = LBDD_DECODER_EXACT;
  opts->workers = 1;
  opts->node_budget = d.node_budget;
  opts->sample_constant = d.bdd.sample_constant;
  opts->conservative_slack = d.bdd.conservative_slack;
  opts->full_grid_max_n = d.full_grid_max_n;
  opts->subsample_queries = d.subsample_queries;
  opts->stop_on_success = d.stop_on_success;
  opts->cap_policy = LBDD_CAP_ALPHA;
}

lbdd_status lbdd_svp_tradeoff(const lbdd_basis* basis, int64_t q, uint64_t seed, const lbdd_svp_options* opts,
                              lbdd_svp_report* report, int64_t* best) {
  LBDD_REQUIRE(basis);
  return guarded([&] {
    RngStream rng(seed, 0);
    fill_report(svp_tradeoff(basis->b, q, rng, solver_options(opts)), report, best);
  });
}

lbdd_status lbdd_svp_minfind(const lbdd_basis* basis, uint64_t seed, const lbdd_svp_options* opts,
                             lbdd_svp_report* report, lbdd_quantum_report* quantum, int64_t* best) {
  LBDD_REQUIRE(basis);
  return guarded([&] {
    RngStream rng(seed, 0);
    auto [run, rep] = svp_shifted_min(basis->b, rng, solver_options(opts));
    fill_report(run, report, best);
    fill_quantum(rep, quantum);
  });
}

lbdd_status lbdd_svp_caps(const lbdd_basis* basis, double alpha, uint64_t budget, uint64_t seed,
                          const lbdd_svp_options* opts, lbdd_svp_report* report, int64_t* best) {
  LBDD_REQUIRE(basis && alpha > 0 && alpha < 0.5 && budget > 0);
  return guarded([&] {
    RngStream rng(seed, 0);
    fill_report(svp_spherical_caps(basis->b, alpha, budget, rng, solver_options(opts)), report, best);
  });
}

lbdd_status lbdd_quantum_cost(int n, int64_t p, double alpha, double eps, lbdd_quantum_report* out) {
  LBDD_REQUIRE(n >= 1 && p >= 2 && out && eps >= 0 && eps < 1);
  return guarded([&] { fill_quantum(quantum_cost_report(n, p, alpha, eps), out); });
}

// ---- cost

lbdd_status lbdd_cost_point_eval(const char* variant, double b, const char* policy, lbdd_cost_point* out) {
  LBDD_REQUIRE(variant && out);
  return guarded([&] {
    auto p = curve_point(CurveVariant::parse(variant), b, cap_policy(policy));
    *out = {p.b, p.A, p.alpha, p.r, p.phi, p.c, p.feasible};
  });
}

lbdd_status lbdd_cost_curve_csv(const char* variant, double step, const char* policy, int workers, char** csv) {
  LBDD_REQUIRE(variant && csv);
  return guarded([&] {
    auto rows = emit_curve(CurveVariant::parse(variant), step, cap_policy(policy), workers > 0 ? workers : 1);
    *csv = dup_string(curve_csv(rows));
  });
}

// ---- verify

void lbdd_verify_options_init(lbdd_verify_options* opts) {
  if (!opts) return;
  opts->quick = 0;
  opts->seed = 1;
  opts->workers = 1;
  opts->combiner_n = 0;
  opts->combiner_q = 0;
  opts->basis = nullptr;
  opts->on_line = nullptr;
  opts->user = nullptr;
}

lbdd_status lbdd_verify(const char* suite, const lbdd_verify_options* opts, char** report, int* all_pass) {
  LBDD_REQUIRE(suite && opts && report);
  return guarded([&] {
    VerifyOptions vo;
    vo.quick = opts->quick != 0;
    vo.seed = opts->seed;
    vo.workers = opts->workers > 0 ? opts->workers : 1;
    vo.combiner_n = opts->combiner_n;
    vo.combiner_q = opts->combiner_q;
    if (opts->basis) vo.basis = opts->basis->b;
    if (opts->on_line)
      vo.on_verdict = [opts](const Verdict& v) { opts->on_line(v.line().c_str(), opts->user); };
    std::string out;
    bool pass = true;
    for (const auto& v : run_verify_suite(suite, vo)) {
      out += v.line() + "\n";
      pass &= v.pass;
    }
    *report = dup_string(out);
    if (all_pass) *all_pass = pass;
  });
}

}  // extern "C"
