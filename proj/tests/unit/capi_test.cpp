// Exercises the library through the C header only.
#include <latticebdd/latticebdd.h>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

struct Basis {
  lbdd_basis* p = nullptr;
  ~Basis() { lbdd_basis_free(p); }
};
struct Batch {
  lbdd_batch* p = nullptr;
  ~Batch() { lbdd_batch_free(p); }
};
struct Oracle {
  lbdd_oracle* p = nullptr;
  ~Oracle() { lbdd_oracle_free(p); }
};

std::string temp_path(const char* name) { return ::testing::TempDir() + name; }

std::vector<int64_t> points(const lbdd_batch* b) {
  std::vector<int64_t> out(lbdd_batch_size(b) * lbdd_batch_rank(b));
  for (size_t i = 0; i < lbdd_batch_size(b); ++i)
    EXPECT_EQ(lbdd_batch_point(b, i, out.data() + i * lbdd_batch_rank(b)), LBDD_OK);
  return out;
}

}  // namespace

TEST(CApi, VersionStrings) {
  EXPECT_STREQ(lbdd_version(), "0.1.0");
  EXPECT_NE(std::string(lbdd_module_versions()).find("bdd-oracle="), std::string::npos);
  EXPECT_STREQ(lbdd_status_name(LBDD_E_IO), "io_error");
}

TEST(CApi, MissingBasisIsIoError) {
  Basis b;
  EXPECT_EQ(lbdd_basis_load("/nonexistent/x.basis", &b.p), LBDD_E_IO);
  EXPECT_EQ(b.p, nullptr);
  EXPECT_NE(std::string(lbdd_last_error()).find("x.basis"), std::string::npos);
}

TEST(CApi, ParseErrorsAndSingularBasis) {
  Basis b;
  EXPECT_EQ(lbdd_basis_parse("2\n1 0\n", &b.p), LBDD_E_PARSE);
  EXPECT_EQ(lbdd_basis_parse("2\n1 2\n2 4\n", &b.p), LBDD_E_SINGULAR_BASIS);
  EXPECT_EQ(lbdd_basis_parse("2\n1 x\n0 1\n", &b.p), LBDD_E_PARSE);
}

TEST(CApi, NullArgumentsRejected) {
  EXPECT_EQ(lbdd_basis_load(nullptr, nullptr), LBDD_E_INVALID_ARGUMENT);
  double l = 0;
  EXPECT_EQ(lbdd_basis_lambda1(nullptr, 0, &l), LBDD_E_INVALID_ARGUMENT);
}

TEST(CApi, BasisRoundTripAndLambda1) {
  Basis b, c;
  ASSERT_EQ(lbdd_basis_parse("# comment\n2\n2 1/2\n0 3\n", &b.p), LBDD_OK);
  EXPECT_EQ(lbdd_basis_rank(b.p), 2);
  char* text = nullptr;
  ASSERT_EQ(lbdd_basis_format(b.p, &text), LBDD_OK);
  ASSERT_EQ(lbdd_basis_parse(text, &c.p), LBDD_OK);
  lbdd_string_free(text);
  double l1 = 0, l2 = 0;
  ASSERT_EQ(lbdd_basis_lambda1(b.p, 0, &l1), LBDD_OK);
  ASSERT_EQ(lbdd_basis_lambda1(c.p, 0, &l2), LBDD_OK);
  EXPECT_DOUBLE_EQ(l1, l2);
  EXPECT_NEAR(l1, std::sqrt(4.25), 1e-12);
}

TEST(CApi, SmoothingBracketOnZ) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(1, &b.p), LBDD_OK);
  double lo = 0, hi = 0;
  ASSERT_EQ(lbdd_smoothing_parameter(b.p, 0.5, &lo, &hi), LBDD_OK);
  // Root of 2e^{-pi s^2} + 2e^{-4 pi s^2} + ... = 1/2, bisected independently.
  EXPECT_NEAR(0.5 * (lo + hi), 0.66783, 1e-5);
  EXPECT_LT(hi - lo, 1e-5);
}

TEST(CApi, SampleIsWorkerInvariantAndRoundTrips) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(3, &b.p), LBDD_OK);
  Batch one, four, loaded;
  ASSERT_EQ(lbdd_sample(b.p, 2.0, 10000, LBDD_SAMPLER_EXACT, 7, 1, 0, &one.p), LBDD_OK);
  ASSERT_EQ(lbdd_sample(b.p, 2.0, 10000, LBDD_SAMPLER_EXACT, 7, 4, 0, &four.p), LBDD_OK);
  EXPECT_EQ(points(one.p), points(four.p));

  const std::string path = temp_path("capi_sample.dgs");
  ASSERT_EQ(lbdd_batch_add_config(one.p, "config test=1"), LBDD_OK);
  ASSERT_EQ(lbdd_batch_save(one.p, path.c_str()), LBDD_OK);
  ASSERT_EQ(lbdd_batch_load(path.c_str(), &loaded.p), LBDD_OK);
  EXPECT_EQ(points(one.p), points(loaded.p));
  EXPECT_DOUBLE_EQ(lbdd_batch_width(loaded.p), 2.0);
  std::remove(path.c_str());
}

TEST(CApi, KleinBelowWidthFails) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(2, &b.p), LBDD_OK);
  Batch out;
  EXPECT_EQ(lbdd_sample(b.p, 0.1, 10, LBDD_SAMPLER_KLEIN, 1, 1, 0, &out.p), LBDD_E_WIDTH);
}

TEST(CApi, CombineAuditHolds) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(2, &b.p), LBDD_OK);
  Batch in, out;
  ASSERT_EQ(lbdd_sample(b.p, 12.0, 4000, LBDD_SAMPLER_EXACT, 3, 1, 0, &in.p), LBDD_OK);
  lbdd_combine_options opts;
  lbdd_combine_options_init(&opts);
  opts.q = 2;
  opts.audit = 1;
  lbdd_combine_report r{};
  ASSERT_EQ(lbdd_combine(in.p, b.p, &opts, 5, &out.p, &r), LBDD_OK);
  EXPECT_EQ(r.outputs, lbdd_batch_size(out.p));
  EXPECT_EQ(r.audited, r.outputs);
  EXPECT_EQ(r.audit_ok, 1);
  EXPECT_NEAR(r.width_out, 12.0 * 3.0 / 2.0, 1e-12);
}

TEST(CApi, CombineTooFewInputs) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(2, &b.p), LBDD_OK);
  Batch in, out;
  ASSERT_EQ(lbdd_sample(b.p, 12.0, 5, LBDD_SAMPLER_EXACT, 3, 1, 0, &in.p), LBDD_OK);
  lbdd_combine_options opts;
  lbdd_combine_options_init(&opts);
  EXPECT_EQ(lbdd_combine(in.p, nullptr, &opts, 5, &out.p, nullptr), LBDD_E_INSUFFICIENT_INPUT);
}

TEST(CApi, OracleSaveLoadDecode) {
  Basis b;
  ASSERT_EQ(lbdd_basis_identity(3, &b.p), LBDD_OK);
  lbdd_bdd_options opts;
  lbdd_bdd_options_init(&opts);
  Oracle o, back;
  ASSERT_EQ(lbdd_oracle_build(b.p, &opts, 11, &o.p), LBDD_OK);
  const std::string path = temp_path("capi_oracle.bdd");
  ASSERT_EQ(lbdd_oracle_save(o.p, path.c_str()), LBDD_OK);
  ASSERT_EQ(lbdd_oracle_load(path.c_str(), &back.p), LBDD_OK);
  lbdd_oracle_info a{}, c{};
  ASSERT_EQ(lbdd_oracle_info_get(o.p, &a), LBDD_OK);
  ASSERT_EQ(lbdd_oracle_info_get(back.p, &c), LBDD_OK);
  EXPECT_EQ(a.m, c.m);
  EXPECT_DOUBLE_EQ(a.alpha, c.alpha);

  const double target[3] = {2.1, -0.85, 4.0};
  int64_t got[3], want[3];
  lbdd_query_report r{};
  ASSERT_EQ(lbdd_oracle_decode(back.p, target, got, &r), LBDD_OK);
  ASSERT_EQ(lbdd_exact_bdd(b.p, target, 0, want), LBDD_OK);
  EXPECT_EQ(std::vector<int64_t>(got, got + 3), std::vector<int64_t>(want, want + 3));
  EXPECT_EQ(std::vector<int64_t>(want, want + 3), (std::vector<int64_t>{2, -1, 4}));
  std::remove(path.c_str());
}

TEST(CApi, SolversFindShortestVector) {
  Basis b;
  ASSERT_EQ(lbdd_basis_parse("3\n3 1 0\n1 4 1\n0 1 5\n", &b.p), LBDD_OK);
  double l1 = 0;
  ASSERT_EQ(lbdd_basis_lambda1(b.p, 0, &l1), LBDD_OK);
  lbdd_svp_options opts;
  lbdd_svp_options_init(&opts);
  lbdd_svp_report r{};
  lbdd_quantum_report q{};
  int64_t best[3];
  ASSERT_EQ(lbdd_svp_minfind(b.p, 1, &opts, &r, &q, best), LBDD_OK);
  EXPECT_EQ(r.success, 1);
  EXPECT_NEAR(r.best_norm, l1, 1e-9);
  EXPECT_EQ(q.classical_queries, 27u);
  EXPECT_EQ(q.quantum_queries, 6u);
  ASSERT_EQ(lbdd_svp_caps(b.p, 0.3, 60, 1, &opts, &r, best), LBDD_OK);
  EXPECT_NEAR(r.lambda1_oracle, l1, 1e-9);
  EXPECT_GT(r.levels, 0u);
  EXPECT_EQ(lbdd_svp_caps(b.p, 0.6, 60, 1, &opts, &r, best), LBDD_E_INVALID_ARGUMENT);
}

TEST(CApi, QuantumCost) {
  lbdd_quantum_report q{};
  ASSERT_EQ(lbdd_quantum_cost(10, 3, 1.0 / 3.0, 0.0, &q), LBDD_OK);
  EXPECT_EQ(q.quantum_queries, 243u);
  EXPECT_EQ(q.classical_queries, 59049u);
  EXPECT_EQ(q.per_query_cost_exponent, 0.0);
  ASSERT_EQ(lbdd_quantum_cost(20, 3, 1.0 / 3.0, std::pow(2.0, -0.322 * 20), &q), LBDD_OK);
  EXPECT_NEAR(q.per_query_cost_exponent, 0.161, 1e-12);
  EXPECT_EQ(lbdd_quantum_cost(20, 1, 0.3, 0.1, &q), LBDD_E_INVALID_ARGUMENT);
}

TEST(CApi, CostPointAndCurve) {
  lbdd_cost_point p{};
  ASSERT_EQ(lbdd_cost_point_eval("cap-large-eps-quantum", 0.0, "optimal", &p), LBDD_OK);
  EXPECT_NEAR(p.c, 0.75, 1e-9);
  EXPECT_EQ(lbdd_cost_point_eval("no-such-curve", 0.0, "optimal", &p), LBDD_E_CONFIG);
  char* csv = nullptr;
  ASSERT_EQ(lbdd_cost_curve_csv("minfind-quantum", 0.201, "optimal", 1, &csv), LBDD_OK);
  EXPECT_EQ(std::string(csv).rfind("b,c\n0.000000,", 0), 0u);
  lbdd_string_free(csv);
}

TEST(CApi, VerifyStreamsVerdicts) {
  lbdd_verify_options opts;
  lbdd_verify_options_init(&opts);
  opts.quick = 1;
  std::vector<std::string> lines;
  opts.user = &lines;
  opts.on_line = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); };
  char* report = nullptr;
  int all_pass = 0;
  ASSERT_EQ(lbdd_verify("cost", &opts, &report, &all_pass), LBDD_OK);
  EXPECT_EQ(all_pass, 1);
  EXPECT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0].rfind("verdict suite=cost property=endpoints pass=1", 0), 0u);
  lbdd_string_free(report);
  EXPECT_EQ(lbdd_verify("nope", &opts, &report, &all_pass), LBDD_E_CONFIG);
}
