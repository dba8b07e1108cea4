// Command-line front end. Talks to the library through the C API only.
//
// Every run prints a report on stdout, one key=value record per line:
//   config ...     the command line as given
//   versions ...   library and module versions
//   <records>      subcommand output
//   done status=<name> seconds=<t>
// Exit status is 0 unless a hard error occurred; failed verdicts are soft.

#include <latticebdd/latticebdd.h>

#include <fmt/core.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct Failure : std::runtime_error {
  lbdd_status status;
  Failure(lbdd_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(lbdd_status s) {
  if (s != LBDD_OK) throw Failure(s, lbdd_last_error());
}

struct BasisDel {
  void operator()(lbdd_basis* b) const { lbdd_basis_free(b); }
};
struct BatchDel {
  void operator()(lbdd_batch* b) const { lbdd_batch_free(b); }
};
struct OracleDel {
  void operator()(lbdd_oracle* o) const { lbdd_oracle_free(o); }
};
struct StrDel {
  void operator()(char* s) const { lbdd_string_free(s); }
};
using Basis = std::unique_ptr<lbdd_basis, BasisDel>;
using Batch = std::unique_ptr<lbdd_batch, BatchDel>;
using Oracle = std::unique_ptr<lbdd_oracle, OracleDel>;
using CString = std::unique_ptr<char, StrDel>;

struct Global {
  std::string basis;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
  std::uint64_t budget_nodes = 0;
  bool quick = false;
  std::string config_line;
};

Basis load_basis(const Global& g) {
  if (g.basis.empty()) throw Failure(LBDD_E_CONFIG, "--basis is required");
  lbdd_basis* b = nullptr;
  check(lbdd_basis_load(g.basis.c_str(), &b));
  return Basis(b);
}

std::string coeffs(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Batches carry the run config in their header.
void save_batch(lbdd_batch* b, const Global& g) {
  check(lbdd_batch_add_config(b, g.config_line.c_str()));
  check(lbdd_batch_add_config(b, (std::string("versions ") + lbdd_module_versions()).c_str()));
  check(lbdd_batch_save(b, g.out.c_str()));
  fmt::print("wrote path={} points={}\n", g.out, lbdd_batch_size(b));
}

void print_points(lbdd_batch* b) {
  std::vector<std::int64_t> c(lbdd_batch_rank(b));
  for (std::size_t i = 0; i < lbdd_batch_size(b); ++i) {
    check(lbdd_batch_point(b, i, c.data()));
    fmt::print("point {}\n", coeffs(c));
  }
}

void emit_batch(lbdd_batch* b, const Global& g) {
  if (g.out.empty())
    print_points(b);
  else
    save_batch(b, g);
}

std::string shell_quote(const std::string& a) {
  if (!a.empty() && a.find_first_of(" \t\"'\\") == std::string::npos) return a;
  std::string q = "'";
  for (char c : a) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

lbdd_cap_policy parse_policy(const std::string& p) {
  if (p == "alpha" || p == "paper") return LBDD_CAP_ALPHA;
  if (p == "optimal") return LBDD_CAP_OPTIMAL;
  throw Failure(LBDD_E_CONFIG, "unknown cap radius policy: " + p);
}

void print_svp(const char* mode, const lbdd_svp_report& r, const std::vector<std::int64_t>& best) {
  fmt::print("svp mode={} best_norm={:.6f} lambda1_oracle={:.6f} queries={} success={}\n", mode, r.best_norm,
             r.lambda1_oracle, r.queries, r.success);
  fmt::print("svp_detail candidates={} declined={} certifying={} p={} alpha={:.6f} eps={:.6g} levels={} "
             "targets={} best={}\n",
             r.candidates, r.declined, r.certifying, r.p, r.alpha, r.eps, r.levels, r.targets, coeffs(best));
}

void print_quantum(const lbdd_quantum_report& q) {
  fmt::print("quantum n={} p={} alpha={:.6f} eps={:.6g} classical_queries={} quantum_queries={} "
             "per_query_exponent={:.4f} exponent_sum={:.4f}\n",
             q.n, q.p, q.alpha, q.eps, q.classical_queries, q.quantum_queries, q.per_query_cost_exponent,
             q.exponent_sum);
}

void verdict_line(const char* line, void*) {
  fmt::print("{}\n", line);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  CLI::App app{"Discrete Gaussian sampling, BDD oracles and SVP solvers on small lattices"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", lbdd_version());
  app.add_option("--basis", g.basis, "basis file");
  app.add_option("--seed", g.seed, "64-bit seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output path");
  app.add_option("--budget-nodes", g.budget_nodes, "enumeration node budget (0: library default)");
  app.add_flag("--quick", g.quick, "reduced verification scale");

  std::function<void()> action;

  // sample
  double s = 0;
  std::uint64_t count = 0;
  std::string sampler = "exact";
  auto* sample = app.add_subcommand("sample", "draw from D_{L,s}");
  sample->add_option("--s", s, "width")->required();
  sample->add_option("--count", count, "number of samples")->required();
  sample->add_option("--sampler", sampler, "exact or klein")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "klein"}));
  sample->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      lbdd_batch* out = nullptr;
      check(lbdd_sample(b.get(), s, count, sampler == "klein" ? LBDD_SAMPLER_KLEIN : LBDD_SAMPLER_EXACT, g.seed,
                        g.workers, g.budget_nodes, &out));
      Batch batch(out);
      fmt::print("sample sampler={} s={:.6f} count={}\n", sampler, s, lbdd_batch_size(out));
      emit_batch(out, g);
    };
  });

  // sample-smoothing
  auto* smooth = app.add_subcommand("sample-smoothing", "draw at s >= eta_{1/3}(L) via dense superlattices");
  smooth->add_option("--s", s, "width")->required();
  smooth->add_option("--count", count, "number of samples")->required();
  smooth->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      lbdd_batch* out = nullptr;
      lbdd_smoothing_stats st{};
      check(lbdd_sample_smoothing(b.get(), s, count, g.seed, &out, &st));
      Batch batch(out);
      fmt::print("sample_smoothing s={:.6f} count={} rounds={} drawn={} kept={} distinct_subspaces={}\n", s,
                 lbdd_batch_size(out), st.rounds, st.drawn, st.kept, st.distinct_subspaces);
      emit_batch(out, g);
    };
  });

  // combine
  std::string in_path, audit_out;
  bool audit = false;
  lbdd_combine_options copt;
  lbdd_combine_options_init(&copt);
  auto* combine = app.add_subcommand("combine", "one combiner pass over a batch");
  combine->add_option("--in", in_path, "input batch")->required();
  combine->add_option("--q", copt.q, "modulus")->capture_default_str();
  combine->add_option("--d", copt.d, "tuple parameter d")->capture_default_str();
  combine->add_option("--C", copt.C, "output count constant")->capture_default_str();
  combine->add_option("--tuple-size", copt.tuple_size, "override the tuple size 8d");
  combine->add_flag("--audit", audit, "check q*o = sum(x) - v on every output");
  combine->add_option("--audit-out", audit_out, "ledger path (default <out>.ledger with --audit)");
  combine->callback([&] {
    action = [&] {
      lbdd_batch* raw = nullptr;
      check(lbdd_batch_load(in_path.c_str(), &raw));
      Batch input(raw);
      Basis b;
      if (!g.basis.empty()) b = load_basis(g);
      if (audit && audit_out.empty() && !g.out.empty()) audit_out = g.out + ".ledger";
      copt.audit = audit;
      copt.audit_path = audit_out.empty() ? nullptr : audit_out.c_str();
      lbdd_combine_report r{};
      lbdd_batch* out = nullptr;
      check(lbdd_combine(input.get(), b.get(), &copt, g.seed, &out, &r));
      Batch batch(out);
      fmt::print("combine q={} d={} inputs={} outputs={} target={} starved={} fallback_matches={} "
                 "width_out={:.6f} closeness={:.3g}\n",
                 copt.q, copt.d, r.inputs, r.outputs, r.target, r.starved, r.fallback_matches, r.width_out,
                 r.closeness);
      if (copt.audit || copt.audit_path)
        fmt::print("audit audited={} holds={} ledger={}\n", r.audited, r.audit_ok,
                   audit_out.empty() ? "-" : audit_out);
      emit_batch(out, g);
    };
  });

  // pipeline
  lbdd_pipeline_options popt;
  lbdd_pipeline_options_init(&popt);
  bool no_width_check = false;
  auto* pipeline = app.add_subcommand("pipeline", "Klein start plus repeated combiner rounds to width s");
  pipeline->add_option("--q", popt.q, "modulus (>= 4)")->capture_default_str();
  pipeline->add_option("--s", popt.s, "target width")->required();
  pipeline->add_option("--count", count, "number of output samples")->required();
  pipeline->add_option("--rounds", popt.forced_rounds, "force the number of combiner rounds");
  pipeline->add_option("--tuple-size", popt.tuple_size, "override the tuple size 8d");
  pipeline->add_flag("--audit", audit, "check q*o = sum(x) - v and write the ledger");
  pipeline->add_option("--audit-out", audit_out, "ledger path (default <out>.ledger with --audit)");
  pipeline->add_flag("--no-width-check", no_width_check, "skip the s >= eta_eps(L) check");
  pipeline->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      if (audit && audit_out.empty() && !g.out.empty()) audit_out = g.out + ".ledger";
      popt.audit = audit;
      popt.audit_path = audit_out.empty() ? nullptr : audit_out.c_str();
      popt.check_width = !no_width_check;
      lbdd_pipeline_report r{};
      lbdd_batch* out = nullptr;
      check(lbdd_pipeline(b.get(), &popt, count, g.seed, &out, &r));
      Batch batch(out);
      fmt::print("pipeline q={} d={} k={} p={} eps={:.6g} alpha={:.6f} start_width={:.6f} s={:.6f} count={}\n",
                 r.q, r.d, r.k, r.p, r.eps, r.alpha, r.start_width, popt.s, lbdd_batch_size(out));
      fmt::print("pipeline_stats klein_samples={} combine_calls={} starved_calls={} filtered_in={} kept={} "
                 "peak_live={}\n",
                 r.klein_samples, r.combine_calls, r.starved_calls, r.filtered_in, r.kept, r.peak_live);
      if (popt.audit || popt.audit_path)
        fmt::print("audit audited={} holds={} ledger={}\n", r.audited, r.audit_ok,
                   audit_out.empty() ? "-" : audit_out);
      emit_batch(out, g);
    };
  });

  // bdd build / query
  lbdd_bdd_options bopt;
  lbdd_bdd_options_init(&bopt);
  double conservative = -1;
  std::int64_t via_q = 0;
  std::string oracle_path, target_text;
  auto* bdd = app.add_subcommand("bdd", "bounded distance decoding oracles");
  bdd->require_subcommand(1);
  auto* bdd_build = bdd->add_subcommand("build", "draw dual samples and freeze an oracle");
  bdd_build->add_option("--eps", bopt.eps, "oracle eps")->capture_default_str();
  bdd_build->add_option("--sample-constant", bopt.sample_constant, "c in m = c n log2(1/eps)/sqrt(eps)")
      ->capture_default_str();
  bdd_build->add_option("--conservative", conservative, "slack subtracted from the decoding radius")
      ->expected(0, 1)
      ->default_str("0.05");
  bdd_build->add_option("--via-pipeline", via_q, "draw dual samples with the combiner pipeline at modulus q");
  bdd_build->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      if (conservative >= 0) bopt.conservative_slack = conservative;
      lbdd_oracle* raw = nullptr;
      if (via_q > 0)
        check(lbdd_oracle_build_pipeline(b.get(), &bopt, via_q, g.seed, &raw));
      else
        check(lbdd_oracle_build(b.get(), &bopt, g.seed, &raw));
      Oracle o(raw);
      lbdd_oracle_info info{};
      check(lbdd_oracle_info_get(o.get(), &info));
      fmt::print("oracle n={} eps={:.6g} requested_eps={:.6g} alpha={:.6f} phi={:.6f} lambda1={:.6f} m={} "
                 "distinct={} dual_width={:.6f}\n",
                 info.n, info.eps, info.requested_eps, info.alpha, info.phi, info.lambda1, info.m, info.distinct,
                 info.dual_width);
      if (!g.out.empty()) {
        check(lbdd_oracle_save(o.get(), g.out.c_str()));
        fmt::print("wrote path={}\n", g.out);
      }
    };
  });
  auto* bdd_query = bdd->add_subcommand("query", "decode one target with a saved oracle");
  bdd_query->add_option("--oracle", oracle_path, "oracle file")->required();
  bdd_query->add_option("--target", target_text, "ambient coordinates, space separated")->required();
  bdd_query->callback([&] {
    action = [&] {
      lbdd_oracle* raw = nullptr;
      check(lbdd_oracle_load(oracle_path.c_str(), &raw));
      Oracle o(raw);
      lbdd_oracle_info info{};
      check(lbdd_oracle_info_get(o.get(), &info));
      std::vector<double> t;
      std::istringstream is(target_text);
      for (double x; is >> x;) t.push_back(x);
      if (!is.eof() || t.size() != static_cast<std::size_t>(info.n))
        throw Failure(LBDD_E_PARSE, fmt::format("target needs {} numbers", info.n));
      std::vector<std::int64_t> c(info.n);
      lbdd_query_report r{};
      const lbdd_status st = lbdd_oracle_decode(o.get(), t.data(), c.data(), &r);
      fmt::print("query estimator_calls={} ascent_steps={} converged={} residual={:.6g}\n", r.estimator_calls,
                 r.ascent_steps, r.converged, r.residual);
      check(st);
      fmt::print("decoded coeffs={}\n", coeffs(c));
    };
  });

  // svp
  lbdd_svp_options sopt;
  lbdd_svp_options_init(&sopt);
  std::string decoder = "exact", policy = "alpha";
  std::int64_t svp_q = 4;
  double alpha = 0;
  std::uint64_t budget = 0;
  bool report_quantum = false;
  auto* svp = app.add_subcommand("svp", "shortest vector solvers built on a BDD oracle");
  svp->require_subcommand(1);
  auto add_svp_common = [&](CLI::App* c) {
    c->add_option("--decoder", decoder, "exact (alpha-bounded enumeration) or gaussian (dual samples)")
        ->capture_default_str()
        ->check(CLI::IsMember({"exact", "gaussian"}));
    c->add_option("--sample-constant", sopt.sample_constant, "dual sample constant for the gaussian decoder");
    c->add_option("--conservative", conservative, "slack subtracted from the decoding radius")
        ->expected(0, 1)
        ->default_str("0.05");
  };
  auto svp_setup = [&] {
    sopt.decoder = decoder == "gaussian" ? LBDD_DECODER_GAUSSIAN : LBDD_DECODER_EXACT;
    sopt.workers = g.workers;
    if (g.budget_nodes) sopt.node_budget = g.budget_nodes;
    if (conservative >= 0) sopt.conservative_slack = conservative;
    sopt.cap_policy = parse_policy(policy);
  };
  auto* tradeoff = svp->add_subcommand("tradeoff", "enumeration over the p-grid of shifted targets");
  add_svp_common(tradeoff);
  tradeoff->add_option("--q", svp_q, "modulus (>= 4)")->capture_default_str();
  tradeoff->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      svp_setup();
      lbdd_svp_report r{};
      std::vector<std::int64_t> best(lbdd_basis_rank(b.get()));
      check(lbdd_svp_tradeoff(b.get(), svp_q, g.seed, &sopt, &r, best.data()));
      print_svp("tradeoff", r, best);
    };
  });
  auto* minfind = svp->add_subcommand("minfind", "minimum over shifted-target decodings");
  add_svp_common(minfind);
  minfind->add_flag("--report-quantum", report_quantum, "also print the quantum query accounting");
  minfind->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      svp_setup();
      lbdd_svp_report r{};
      lbdd_quantum_report q{};
      std::vector<std::int64_t> best(lbdd_basis_rank(b.get()));
      check(lbdd_svp_minfind(b.get(), g.seed, &sopt, &r, &q, best.data()));
      print_svp("minfind", r, best);
      if (report_quantum) print_quantum(q);
    };
  });
  auto* caps = svp->add_subcommand("caps", "spherical capping with random targets");
  add_svp_common(caps);
  caps->add_option("--alpha", alpha, "BDD radius factor in (0, 1/2)")->required();
  caps->add_option("--budget", budget, "random targets per radius level")->required();
  caps->add_option("--cap-radius-policy", policy, "alpha or optimal (paper: alias of alpha)")
      ->capture_default_str()
      ->check(CLI::IsMember({"alpha", "optimal", "paper"}));
  caps->callback([&] {
    action = [&] {
      auto b = load_basis(g);
      svp_setup();
      lbdd_svp_report r{};
      std::vector<std::int64_t> best(lbdd_basis_rank(b.get()));
      check(lbdd_svp_caps(b.get(), alpha, budget, g.seed, &sopt, &r, best.data()));
      print_svp("caps", r, best);
    };
  });

  // cost
  std::string variant;
  double b_value = 0, step = 0.002;
  std::string cost_policy = "optimal";
  auto* cost = app.add_subcommand("cost", "asymptotic cost model");
  cost->require_subcommand(1);
  auto* curve = cost->add_subcommand("curve", "b,c rows over b in [0, 0.402]");
  curve->add_option("--variant", variant, "curve variant")->required();
  curve->add_option("--step", step, "b step")->capture_default_str();
  curve->add_option("--policy", cost_policy, "cap radius policy")
      ->capture_default_str()
      ->check(CLI::IsMember({"alpha", "optimal", "paper"}));
  curve->callback([&] {
    action = [&] {
      char* raw = nullptr;
      check(lbdd_cost_curve_csv(variant.c_str(), step, cost_policy.c_str(), g.workers, &raw));
      CString csv(raw);
      if (g.out.empty()) {
        fmt::print("{}", csv.get());
        return;
      }
      std::ofstream os(g.out);
      if (!(os << csv.get()) || !os.flush()) throw Failure(LBDD_E_IO, "cannot write " + g.out);
      fmt::print("wrote path={} variant={}\n", g.out, variant);
    };
  });
  auto* point = cost->add_subcommand("point", "one cost point");
  point->add_option("--variant", variant, "curve variant")->required();
  point->add_option("--b", b_value, "kissing exponent b")->required();
  point->add_option("--policy", cost_policy, "cap radius policy")
      ->capture_default_str()
      ->check(CLI::IsMember({"alpha", "optimal", "paper"}));
  point->callback([&] {
    action = [&] {
      lbdd_cost_point p{};
      check(lbdd_cost_point_eval(variant.c_str(), b_value, cost_policy.c_str(), &p));
      fmt::print("cost variant={} b={:.6f} A={:.6f} alpha={:.6f} r={:.6f} phi={:.6f} c={:.6f} feasible={}\n",
                 variant, p.b, p.A, p.alpha, p.r, p.phi, p.c, p.feasible);
    };
  });

  // verify
  std::string suite = "all";
  int vn = 0;
  std::int64_t vq = 0;
  auto* verify = app.add_subcommand("verify", "property suites");
  verify->add_option("suite", suite, "lattice, gauss, combiner, smoothing, bdd, svp, cost or all")
      ->capture_default_str();
  verify->add_option("--n", vn, "combiner suite dimension");
  verify->add_option("--q", vq, "combiner suite modulus");
  verify->callback([&] {
    action = [&] {
      Basis b;
      if (!g.basis.empty()) b = load_basis(g);
      lbdd_verify_options vo;
      lbdd_verify_options_init(&vo);
      vo.quick = g.quick;
      vo.seed = g.seed;
      vo.workers = g.workers;
      vo.combiner_n = vn;
      vo.combiner_q = vq;
      vo.basis = b.get();
      vo.on_line = verdict_line;
      char* raw = nullptr;
      int all_pass = 0;
      check(lbdd_verify(suite.c_str(), &vo, &raw, &all_pass));
      // Verdict lines were already streamed through on_line.
      CString report(raw);
      fmt::print("summary suite={} all_pass={}\n", suite, all_pass);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  g.config_line = "config args=";
  {
    std::string args;
    for (int i = 1; i < argc; ++i) args += (i > 1 ? " " : "") + shell_quote(argv[i]);
    g.config_line += fmt::format("\"{}\" seed={} workers={}", args, g.seed, g.workers);
  }
  fmt::print("{}\n", g.config_line);
  fmt::print("versions latticebdd={} {}\n", lbdd_version(), lbdd_module_versions());
  std::fflush(stdout);

  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    action();
  } catch (const Failure& f) {
    fmt::print("done status={} seconds={:.3f} message=\"{}\"\n", lbdd_status_name(f.status), seconds(), f.what());
    fmt::print(stderr, "lbdd: {}: {}\n", lbdd_status_name(f.status), f.what());
    return 1;
  }
  fmt::print("done status=ok seconds={:.3f}\n", seconds());
  return 0;
}
