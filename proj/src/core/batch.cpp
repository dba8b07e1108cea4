#include "core/batch.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace lbdd {

void write_batch(std::ostream& out, const GaussianBatch& batch) {
  for (const auto& line : batch.config) out << "# " << line << '\n';
  out << fmt::format("DGS {} {} {:.17g} {} {} {:.17g}\n", batch.n, batch.q, batch.width,
                     batch.stream_id, batch.points.size(), batch.claimed_closeness);
  std::string row;
  for (const auto& p : batch.points) {
    row.clear();
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
      if (i) row += ' ';
      row += std::to_string(p.coeffs[i]);
    }
    row += '\n';
    out << row;
  }
}

GaussianBatch read_batch(std::istream& in) {
  GaussianBatch b;
  std::string line;
  bool have_header = false;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto start = line.find_first_not_of("# ");
      b.config.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    std::istringstream hs(line);
    std::string tag;
    hs >> tag >> b.n >> b.q >> b.width >> b.stream_id >> count >> b.claimed_closeness;
    if (tag != "DGS" || hs.fail() || b.n <= 0) throw ParseError("bad batch header: " + line);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError("missing batch header");
  b.points.reserve(count);
  while (b.points.size() < count && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream rs(line);
    IntVector z(b.n);
    for (auto& v : z) rs >> v;
    if (rs.fail()) throw ParseError("bad batch row: " + line);
    b.points.push_back(LatticePoint{std::move(z)});
  }
  if (b.points.size() != count)
    throw ParseError(fmt::format("batch truncated: expected {} rows, got {}", count, b.points.size()));
  return b;
}

void save_batch(const std::string& path, const GaussianBatch& batch) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_batch(out, batch);
  if (!out) throw IoError("write failed: " + path);
}

GaussianBatch load_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return read_batch(in);
}

GaussianBatch merge_batches(std::vector<GaussianBatch> batches) {
  GaussianBatch out;
  if (batches.empty()) return out;
  std::stable_sort(batches.begin(), batches.end(),
                   [](const auto& a, const auto& b) { return a.stream_id < b.stream_id; });
  out.n = batches.front().n;
  out.width = batches.front().width;
  out.q = batches.front().q;
  out.stream_id = batches.front().stream_id;
  out.config = batches.front().config;
  for (auto& b : batches) {
    out.claimed_closeness = std::min(1.0, out.claimed_closeness + b.claimed_closeness);
    for (auto& p : b.points) out.points.push_back(std::move(p));
  }
  return out;
}

}  // namespace lbdd
