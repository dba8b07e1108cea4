#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "core/batch.hpp"
#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace lbdd {

struct CombinerConfig {
  std::int64_t q = 2;
  int d = 1;
  std::uint64_t C = 1;
  // 0 means the standard 8d.
  int tuple_size = 0;
  // eps the width precondition s >= 2 sqrt(d) q eta_eps(L) is checked against.
  double eps = 0.01;

  int w() const { return tuple_size > 0 ? tuple_size : 8 * d; }
  // q^{n/d}
  double coset_factor(int n) const;
  // N = 160 d^2 C q^{n/d}, rounded up.
  std::uint64_t input_count(int n) const;
  // C q^{n/d}, rounded up.
  std::uint64_t target_outputs(int n) const;
  double width_out(double s) const;
  // 4 eps^{2d} N + 11 C q^{-5n/2}
  double closeness(int n) const;
};

// One emitted point: q * output = sum(tuple) - anchor.
struct AuditEntry {
  std::size_t anchor = 0;
  std::vector<std::size_t> tuple;
  LatticePoint output;
};

struct CombineResult {
  GaussianBatch batch;
  std::uint64_t target = 0;
  bool starved = false;
  // Anchors resolved by the exact class-count search after the random probe failed.
  std::uint64_t fallback_matches = 0;
  std::vector<AuditEntry> audit;
};

// The tuple combiner. Input indices refer to input.points. Throws
// InsufficientInput when |input| < N. The width precondition is verified via
// smoothing_parameter when `basis` is given and n <= 6.
CombineResult combine_batch(const GaussianBatch& input, const CombinerConfig& cfg, RngStream& rng,
                            const LatticeBasis* basis = nullptr, bool audit = false);

// Exact search for w distinct indices whose labels sum to target; the first
// feasible indices in label order are returned. Reads labels only.
std::optional<std::vector<std::size_t>> find_matching_tuple(std::span<const CosetLabel> labels,
                                                            const CosetLabel& target, int w);

// Keeps points in pL, divided by p.
GaussianBatch filter_sublattice(const GaussianBatch& input, std::int64_t p);

// Verifies q * o = sum(x_i) - v for every audit entry.
bool audit_holds(const GaussianBatch& input, const CombineResult& result);

// One line per audit entry: "ledger call=.. level=.. v=.. sum=.. o=.. holds=0|1",
// coefficient vectors comma separated.
void write_audit(std::ostream& os, const GaussianBatch& input, const CombineResult& result,
                 std::uint64_t call, int level);

struct PipelineConfig {
  std::int64_t q = 4;
  int n = 0;
  double eps = 0.0;
  int d = 1;
  double alpha = 0.0;
  std::int64_t p = 0;
  int k = 0;
  double s = 0.0;
  std::uint64_t C = 1;
  int tuple_size = 0;

  double start_width() const;
  CombinerConfig combiner() const;
};

// Derives eps, d, alpha, p and k for target width s. forced_rounds >= 0
// overrides k (the start width grows accordingly). q must satisfy q >= 4;
// the q <= sqrt(n) bound is reported but not enforced at desk scale.
PipelineConfig make_pipeline_config(const LatticeBasis& basis, std::int64_t q, double s,
                                    int forced_rounds = -1);

struct PipelineStats {
  std::uint64_t klein_samples = 0;
  std::uint64_t combine_calls = 0;
  std::uint64_t starved_calls = 0;
  std::uint64_t filtered_in = 0;
  std::uint64_t kept = 0;
  std::uint64_t peak_live = 0;
  std::uint64_t audited = 0;
  bool audit_ok = true;
};

struct PipelineResult {
  GaussianBatch batch;
  PipelineStats stats;
};

PipelineResult dgs_pipeline(const LatticeBasis& basis, const PipelineConfig& cfg,
                            std::uint64_t count, RngStream& rng, bool audit = false,
                            bool check_width = true, std::ostream* ledger = nullptr);

}  // namespace lbdd
