#include "core/dense.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <spdlog/spdlog.h>
#include <variant>

#include "core/errors.hpp"
#include "core/gauss.hpp"

namespace lbdd {

namespace {

using Gf2Rows = std::vector<std::vector<std::uint8_t>>;

// In-place reduced row echelon form; returns the rank.
int rref(Gf2Rows& rows, int n) {
  int rank = 0;
  for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && rows[r][col])
        for (int c = 0; c < n; ++c) rows[r][c] ^= rows[rank][c];
    ++rank;
  }
  return rank;
}

double ball_volume(int n, double r) {
  return std::pow(std::numbers::pi, n / 2.0) * std::pow(r, n) / std::tgamma(n / 2.0 + 1.0);
}

constexpr double kExactTableLimit = 2e6;

// Exact table when it is small enough, Klein otherwise.
class DenseSampler {
 public:
  DenseSampler(const LatticeBasis& basis, double s) {
    const int n = basis.rank();
    const double est = ball_volume(n, tail_radius(s, n)) / basis.abs_determinant().get_d();
    if (est <= kExactTableLimit) impl_.emplace<ExactSampler>(basis, s);
    else impl_.emplace<KleinSampler>(basis, s);
  }
  LatticePoint sample(RngStream& rng) const {
    return std::visit([&](const auto& s) -> LatticePoint {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::monostate>) return {};
      else return s.sample(rng);
    }, impl_);
  }

 private:
  std::variant<std::monostate, ExactSampler, KleinSampler> impl_;
};

}  // namespace

Gf2Rows random_gf2_subspace(int n, int a, RngStream& rng) {
  if (a < 0 || a > n) throw ConfigError("subspace dimension out of range");
  for (;;) {
    Gf2Rows rows(a, std::vector<std::uint8_t>(n));
    for (auto& r : rows)
      for (auto& bit : r) bit = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    if (rref(rows, n) == a) return rows;
  }
}

int default_index_log(int n) {
  if (n <= 1) return 1;
  return std::min((n + 1) / 2 + 4, n - 1);
}

DenseSuperlattice dense_superlattice(const LatticeBasis& basis, int a, RngStream& rng) {
  const int n = basis.rank();
  DenseSuperlattice out{basis, basis, a, random_gf2_subspace(n, a, rng), {}, {}};
  // Columns of H: the subspace rows at their pivots, 2 e_i elsewhere.
  std::vector<int> pivot_row(n, -1);
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < n; ++c)
      if (out.subspace[r][c]) {
        pivot_row[c] = r;
        break;
      }
  std::vector<IntVector> h_cols;
  for (int c = 0; c < n; ++c) {
    IntVector col(n, 0);
    if (pivot_row[c] >= 0) {
      for (int k = 0; k < n; ++k) col[k] = out.subspace[pivot_row[c]][k];
    } else {
      col[c] = 2;
    }
    h_cols.push_back(std::move(col));
  }
  out.half_coeffs.assign(n, IntVector(n, 0));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out.half_coeffs[k][j] = h_cols[j][k];

  std::vector<RationalVector> dense_cols;
  for (int j = 0; j < n; ++j) {
    auto v = basis.embed(h_cols[j]);
    for (auto& x : v) x /= 2;
    dense_cols.push_back(std::move(v));
  }
  out.dense = LatticeBasis::from_columns(std::move(dense_cols));

  // base e_i = H (2 H^{-1} e_i) / 2
  const auto h = LatticeBasis::from_integer_columns(h_cols);
  out.base_in_dense.assign(n, IntVector(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Rational v = 2 * h.inverse_rows()[j][i];
      if (v.get_den() != 1) throw Error(ErrorCode::kInfeasible, "non-integral inclusion certificate");
      out.base_in_dense[j][i] = v.get_num().get_si();
    }
  return out;
}

bool DenseSuperlattice::contains_base_point(const IntVector& u, IntVector* z) const {
  const int n = base.rank();
  IntVector hu(n, 0);
  for (int k = 0; k < n; ++k) {
    std::int64_t acc = 0;
    for (int j = 0; j < n; ++j) acc += half_coeffs[k][j] * u[j];
    if (acc % 2 != 0) return false;
    hu[k] = acc / 2;
  }
  if (z) *z = std::move(hu);
  return true;
}

bool DenseSuperlattice::verify() const {
  const int n = base.rank();
  for (int i = 0; i < n; ++i) {
    IntVector u(n);
    for (int j = 0; j < n; ++j) u[j] = base_in_dense[j][i];
    if (dense.embed(u) != base.column(i)) return false;
  }
  for (int j = 0; j < n; ++j) {
    IntVector hcol(n);
    for (int k = 0; k < n; ++k) hcol[k] = half_coeffs[k][j];
    auto doubled = dense.column(j);
    for (auto& x : doubled) x *= 2;
    if (doubled != base.embed(hcol)) return false;
  }
  Rational ratio = base.abs_determinant() / dense.abs_determinant();
  return ratio == Rational(mpz_class(1) << a);
}

GaussianBatch sample_at_smoothing(const LatticeBasis& basis, double s, std::uint64_t m,
                                  RngStream& rng, SmoothingSampleStats* stats, bool check_width) {
  const int n = basis.rank();
  if (check_width && n <= 6) {
    const double eta = smoothing_parameter(basis, 1.0 / 3.0).s_lo;
    if (s < eta * (1.0 - 1e-9))
      throw WidthTooSmall("sample_at_smoothing needs s >= eta_{1/3}(L) = " + std::to_string(eta));
  }
  const int a = default_index_log(n);
  const std::uint64_t per_round = std::uint64_t{2} << a;
  std::map<Gf2Rows, std::shared_ptr<const DenseSampler>> cache;
  SmoothingSampleStats local;
  GaussianBatch out;
  out.n = n;
  out.width = s;
  out.stream_id = rng.stream_id();
  out.points.reserve(m);
  while (out.points.size() < m) {
    auto ds = dense_superlattice(basis, a, rng);
    auto& sampler = cache[ds.subspace];
    if (!sampler) sampler = std::make_shared<const DenseSampler>(ds.dense, s);
    ++local.rounds;
    for (std::uint64_t r = 0; r < per_round && out.points.size() < m; ++r) {
      auto u = sampler->sample(rng);
      ++local.drawn;
      IntVector z;
      if (ds.contains_base_point(u.coeffs, &z)) {
        out.points.push_back(LatticePoint{std::move(z)});
        ++local.kept;
      }
    }
  }
  local.distinct_subspaces = cache.size();
  out.claimed_closeness = std::min(1.0, static_cast<double>(m) * kTailMass);
  spdlog::debug("sample_at_smoothing: {} rounds, {} drawn, {} kept", local.rounds, local.drawn,
                local.kept);
  if (stats) *stats = local;
  return out;
}

}  // namespace lbdd
