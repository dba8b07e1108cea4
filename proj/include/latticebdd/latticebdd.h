/* latticebdd: discrete Gaussian sampling, BDD oracles and enumeration-based
 * SVP solvers for low-dimensional lattices, plus the asymptotic cost model.
 *
 * All functions return an lbdd_status. On failure the message is available
 * from lbdd_last_error() on the calling thread until the next call fails.
 * Handles are opaque; free them with the matching *_free function.
 * Every randomized call takes an explicit 64-bit seed and is deterministic
 * given its inputs, independent of the worker count. */
#ifndef LATTICEBDD_LATTICEBDD_H
#define LATTICEBDD_LATTICEBDD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define LBDD_API __attribute__((visibility("default")))
#else
#define LBDD_API
#endif

typedef enum lbdd_status {
  LBDD_OK = 0,
  LBDD_E_SINGULAR_BASIS = 1,
  LBDD_E_BUDGET = 2,
  LBDD_E_WIDTH = 3,
  LBDD_E_INSUFFICIENT_INPUT = 4,
  LBDD_E_NOT_CONVERGED = 5,
  LBDD_E_OUT_OF_DOMAIN = 6,
  LBDD_E_INFEASIBLE = 7,
  LBDD_E_CONFIG = 8,
  LBDD_E_IO = 9,
  LBDD_E_PARSE = 10,
  LBDD_E_INVALID_ARGUMENT = 11,
  LBDD_E_INTERNAL = 12
} lbdd_status;

typedef struct lbdd_basis lbdd_basis;
typedef struct lbdd_batch lbdd_batch;
typedef struct lbdd_oracle lbdd_oracle;

LBDD_API const char* lbdd_version(void);
/* "lattice-core=<v> gauss-sampler=<v> ..." */
LBDD_API const char* lbdd_module_versions(void);
LBDD_API const char* lbdd_status_name(lbdd_status status);
LBDD_API const char* lbdd_last_error(void);
/* Strings returned through char** outputs are released with this. */
LBDD_API void lbdd_string_free(char* s);

/* ---- bases */

LBDD_API lbdd_status lbdd_basis_load(const char* path, lbdd_basis** out);
/* First non-comment line n, then n generator lines of rationals ("3", "-1/2"). */
LBDD_API lbdd_status lbdd_basis_parse(const char* text, lbdd_basis** out);
LBDD_API lbdd_status lbdd_basis_identity(int n, lbdd_basis** out);
LBDD_API void lbdd_basis_free(lbdd_basis* basis);
LBDD_API int lbdd_basis_rank(const lbdd_basis* basis);
LBDD_API lbdd_status lbdd_basis_format(const lbdd_basis* basis, char** text);
LBDD_API lbdd_status lbdd_basis_lambda1(const lbdd_basis* basis, uint64_t node_budget, double* lambda1);
/* Bracket [s_lo, s_hi] around eta_eps(L). */
LBDD_API lbdd_status lbdd_smoothing_parameter(const lbdd_basis* basis, double eps, double* s_lo,
                                              double* s_hi);

/* ---- batches of lattice points (coefficients in the basis) */

LBDD_API lbdd_status lbdd_batch_load(const char* path, lbdd_batch** out);
LBDD_API lbdd_status lbdd_batch_save(const lbdd_batch* batch, const char* path);
LBDD_API void lbdd_batch_free(lbdd_batch* batch);
LBDD_API size_t lbdd_batch_size(const lbdd_batch* batch);
LBDD_API int lbdd_batch_rank(const lbdd_batch* batch);
LBDD_API double lbdd_batch_width(const lbdd_batch* batch);
LBDD_API double lbdd_batch_closeness(const lbdd_batch* batch);
/* Copies point i into coeffs[0..rank). */
LBDD_API lbdd_status lbdd_batch_point(const lbdd_batch* batch, size_t i, int64_t* coeffs);
/* Appends a '#' provenance line written into the batch file header. */
LBDD_API lbdd_status lbdd_batch_add_config(lbdd_batch* batch, const char* line);

typedef enum lbdd_sampler { LBDD_SAMPLER_EXACT = 0, LBDD_SAMPLER_KLEIN = 1 } lbdd_sampler;

/* count samples of D_{L,s} from the exact table or Klein's sampler. */
LBDD_API lbdd_status lbdd_sample(const lbdd_basis* basis, double s, uint64_t count, lbdd_sampler kind,
                                 uint64_t seed, int workers, uint64_t node_budget, lbdd_batch** out);

typedef struct lbdd_smoothing_stats {
  uint64_t rounds;
  uint64_t drawn;
  uint64_t kept;
  uint64_t distinct_subspaces;
} lbdd_smoothing_stats;

/* Samples of D_{L,s} at s >= eta_{1/3}(L) by rejection from dense superlattices. */
LBDD_API lbdd_status lbdd_sample_smoothing(const lbdd_basis* basis, double s, uint64_t count,
                                           uint64_t seed, lbdd_batch** out, lbdd_smoothing_stats* stats);

typedef struct lbdd_combine_options {
  int64_t q;
  int d;
  uint64_t C;
  /* 0 means 8d. */
  int tuple_size;
  /* Record and check q*o = sum(x) - v for every output. */
  int audit;
  /* Optional; the per-output ledger is written here (implies audit). */
  const char* audit_path;
} lbdd_combine_options;

LBDD_API void lbdd_combine_options_init(lbdd_combine_options* opts);

typedef struct lbdd_combine_report {
  uint64_t inputs;
  uint64_t outputs;
  uint64_t target;
  int starved;
  uint64_t fallback_matches;
  uint64_t audited;
  int audit_ok;
  double width_out;
  double closeness;
} lbdd_combine_report;

/* basis may be NULL; with a basis the width precondition is checked (n <= 6). */
LBDD_API lbdd_status lbdd_combine(const lbdd_batch* input, const lbdd_basis* basis,
                                  const lbdd_combine_options* opts, uint64_t seed, lbdd_batch** out,
                                  lbdd_combine_report* report);

typedef struct lbdd_pipeline_options {
  int64_t q;
  /* Target output width. */
  double s;
  /* -1 derives the number of rounds. */
  int forced_rounds;
  int tuple_size;
  int audit;
  /* Optional; ledger of every combine call, one line per output (implies audit). */
  const char* audit_path;
  int check_width;
} lbdd_pipeline_options;

LBDD_API void lbdd_pipeline_options_init(lbdd_pipeline_options* opts);

typedef struct lbdd_pipeline_report {
  int64_t q;
  int d;
  int k;
  int64_t p;
  double eps;
  double alpha;
  double start_width;
  uint64_t klein_samples;
  uint64_t combine_calls;
  uint64_t starved_calls;
  uint64_t filtered_in;
  uint64_t kept;
  uint64_t peak_live;
  uint64_t audited;
  int audit_ok;
} lbdd_pipeline_report;

LBDD_API lbdd_status lbdd_pipeline(const lbdd_basis* basis, const lbdd_pipeline_options* opts,
                                   uint64_t count, uint64_t seed, lbdd_batch** out,
                                   lbdd_pipeline_report* report);

/* ---- BDD oracles */

typedef struct lbdd_bdd_options {
  double eps;
  double sample_constant;
  double conservative_slack;
  double min_eps;
  double max_eps;
  uint64_t max_samples;
} lbdd_bdd_options;

LBDD_API void lbdd_bdd_options_init(lbdd_bdd_options* opts);

typedef struct lbdd_oracle_info {
  int n;
  double eps;
  double requested_eps;
  double alpha;
  double phi;
  double lambda1;
  uint64_t m;
  uint64_t distinct;
  double dual_width;
  double sample_constant;
  double conservative_slack;
} lbdd_oracle_info;

LBDD_API lbdd_status lbdd_oracle_build(const lbdd_basis* basis, const lbdd_bdd_options* opts,
                                       uint64_t seed, lbdd_oracle** out);
/* Dual samples drawn with the combiner pipeline at modulus q. */
LBDD_API lbdd_status lbdd_oracle_build_pipeline(const lbdd_basis* basis, const lbdd_bdd_options* opts,
                                                int64_t q, uint64_t seed, lbdd_oracle** out);
LBDD_API lbdd_status lbdd_oracle_save(const lbdd_oracle* oracle, const char* path);
LBDD_API lbdd_status lbdd_oracle_load(const char* path, lbdd_oracle** out);
LBDD_API void lbdd_oracle_free(lbdd_oracle* oracle);
LBDD_API lbdd_status lbdd_oracle_info_get(const lbdd_oracle* oracle, lbdd_oracle_info* info);

typedef struct lbdd_query_report {
  uint64_t estimator_calls;
  uint64_t ascent_steps;
  int converged;
  double residual;
} lbdd_query_report;

/* target has rank entries (ambient coordinates); coeffs receives the decoded
 * point. LBDD_E_NOT_CONVERGED when the ascent budget runs out. */
LBDD_API lbdd_status lbdd_oracle_decode(const lbdd_oracle* oracle, const double* target, int64_t* coeffs,
                                        lbdd_query_report* report);
/* Closest lattice point by enumeration. */
LBDD_API lbdd_status lbdd_exact_bdd(const lbdd_basis* basis, const double* target, uint64_t node_budget,
                                    int64_t* coeffs);

/* ---- SVP solvers */

typedef enum lbdd_decoder { LBDD_DECODER_EXACT = 0, LBDD_DECODER_GAUSSIAN = 1 } lbdd_decoder;
/* Cap center radius: alpha (1 - 1/n) d, or min(alpha, sqrt(1 - 4 alpha^2)) (1 - 1/n) d. */
typedef enum lbdd_cap_policy { LBDD_CAP_ALPHA = 0, LBDD_CAP_OPTIMAL = 1 } lbdd_cap_policy;

typedef struct lbdd_svp_options {
  lbdd_decoder decoder;
  int workers;
  uint64_t node_budget;
  double sample_constant;
  double conservative_slack;
  int full_grid_max_n;
  uint64_t subsample_queries;
  int stop_on_success;
  lbdd_cap_policy cap_policy;
} lbdd_svp_options;

LBDD_API void lbdd_svp_options_init(lbdd_svp_options* opts);

typedef struct lbdd_svp_report {
  uint64_t seed;
  uint64_t queries;
  uint64_t candidates;
  uint64_t declined;
  double best_norm;
  double lambda1_oracle;
  int success;
  int certifying;
  int64_t p;
  double alpha;
  double eps;
  /* Caps solver: radius levels visited and targets drawn over all levels. */
  uint64_t levels;
  uint64_t targets;
} lbdd_svp_report;

typedef struct lbdd_quantum_report {
  int n;
  int64_t p;
  double alpha;
  double eps;
  uint64_t classical_queries;
  uint64_t quantum_queries;
  double per_query_cost_exponent;
  double exponent_sum;
} lbdd_quantum_report;

/* caps: 0 < alpha < 1/2 and budget > 0 targets per radius level.
 * best (rank entries, may be NULL) receives the coefficients of the returned vector. */
LBDD_API lbdd_status lbdd_svp_tradeoff(const lbdd_basis* basis, int64_t q, uint64_t seed,
                                       const lbdd_svp_options* opts, lbdd_svp_report* report, int64_t* best);
LBDD_API lbdd_status lbdd_svp_minfind(const lbdd_basis* basis, uint64_t seed, const lbdd_svp_options* opts,
                                      lbdd_svp_report* report, lbdd_quantum_report* quantum, int64_t* best);
LBDD_API lbdd_status lbdd_svp_caps(const lbdd_basis* basis, double alpha, uint64_t budget, uint64_t seed,
                                   const lbdd_svp_options* opts, lbdd_svp_report* report, int64_t* best);
/* eps = 0 stands for an exact decoder (per-query exponent 0). */
LBDD_API lbdd_status lbdd_quantum_cost(int n, int64_t p, double alpha, double eps, lbdd_quantum_report* out);

/* ---- cost model */

typedef struct lbdd_cost_point {
  double b;
  double A;
  double alpha;
  double r;
  double phi;
  double c;
  int feasible;
} lbdd_cost_point;

/* variant: cap-small-eps-classical, cap-small-eps-quantum, cap-large-eps-classical,
 * cap-large-eps-quantum, minfind-classical, minfind-quantum.
 * policy: "alpha" (cap radius alpha) or "optimal" (min(alpha, sqrt(1 - 4 alpha^2))). */
LBDD_API lbdd_status lbdd_cost_point_eval(const char* variant, double b, const char* policy,
                                          lbdd_cost_point* out);
/* "b,c" CSV over b = 0, step, ..., 0.402. */
LBDD_API lbdd_status lbdd_cost_curve_csv(const char* variant, double step, const char* policy, int workers,
                                         char** csv);

/* ---- verification suites */

typedef struct lbdd_verify_options {
  int quick;
  uint64_t seed;
  int workers;
  int combiner_n;
  int64_t combiner_q;
  /* Optional; the bdd and svp suites default to Z^4. */
  const lbdd_basis* basis;
  /* Optional; receives each verdict line as soon as it is available. */
  void (*on_line)(const char* line, void* user);
  void* user;
} lbdd_verify_options;

LBDD_API void lbdd_verify_options_init(lbdd_verify_options* opts);

/* suite: lattice, gauss, combiner, smoothing, bdd, svp, cost or all. report
 * receives one "verdict ..." line per property; all_pass is set to 1 when
 * every verdict passed. */
LBDD_API lbdd_status lbdd_verify(const char* suite, const lbdd_verify_options* opts, char** report,
                                 int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
