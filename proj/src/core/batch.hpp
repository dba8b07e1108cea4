#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/lattice.hpp"

namespace lbdd {

// Lattice points drawn at a common width from one RNG stream.
struct GaussianBatch {
  int n = 0;
  std::vector<LatticePoint> points;
  double width = 0.0;
  std::uint64_t stream_id = 0;
  // Statistical-distance bound asserted by the producer, in [0, 1].
  double claimed_closeness = 0.0;
  // Modulus of the producing combiner, 0 when irrelevant.
  std::int64_t q = 0;
  // Free-form provenance lines written as '#' comments.
  std::vector<std::string> config;

  std::size_t size() const { return points.size(); }
};

// Text format:
//   # config lines
//   DGS <n> <q> <s> <stream_id> <count> <closeness>
//   <count> rows of n integers
void write_batch(std::ostream& out, const GaussianBatch& batch);
GaussianBatch read_batch(std::istream& in);
void save_batch(const std::string& path, const GaussianBatch& batch);
GaussianBatch load_batch(const std::string& path);

// Merge batches ordered by stream id, then by index within the batch.
GaussianBatch merge_batches(std::vector<GaussianBatch> batches);

}  // namespace lbdd
