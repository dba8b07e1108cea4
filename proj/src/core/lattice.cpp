#include "core/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "core/errors.hpp"

namespace lbdd {

namespace {

constexpr double kBoundarySlack = 1e-9;

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw BudgetExceeded("integer coefficient overflow");
  return z.get_si();
}

Rational parse_rational(const std::string& token) {
  try {
    auto dot_pos = token.find('.');
    if (dot_pos == std::string::npos) {
      Rational r(token, 10);
      r.canonicalize();
      return r;
    }
    // Decimal literal: exact conversion digits / 10^k.
    std::string digits = token.substr(0, dot_pos) + token.substr(dot_pos + 1);
    std::size_t frac_len = token.size() - dot_pos - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument(token);
    if (digits[0] == '+') digits.erase(0, 1);
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rational r(num, den);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational literal '" + token + "'");
  }
}

struct ExactGso {
  std::vector<RationalVector> vectors;
  std::vector<Rational> sq_norms;
  std::vector<std::vector<Rational>> mu;
};

ExactGso exact_gso(const std::vector<RationalVector>& cols) {
  const std::size_t n = cols.size();
  ExactGso g;
  g.vectors.resize(n);
  g.sq_norms.resize(n);
  g.mu.assign(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    g.vectors[i] = cols[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (g.sq_norms[j] == 0) continue;
      g.mu[i][j] = dot(cols[i], g.vectors[j]) / g.sq_norms[j];
      for (std::size_t k = 0; k < n; ++k) g.vectors[i][k] -= g.mu[i][j] * g.vectors[j][k];
    }
    g.sq_norms[i] = dot(g.vectors[i], g.vectors[i]);
  }
  return g;
}

Orthogonalization round_gso(const ExactGso& g) {
  const std::size_t n = g.vectors.size();
  Orthogonalization o;
  o.vectors.assign(n, std::vector<double>(n));
  o.sq_norms.resize(n);
  o.mu.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) o.vectors[i][k] = g.vectors[i][k].get_d();
    o.sq_norms[i] = g.sq_norms[i].get_d();
    for (std::size_t j = 0; j < i; ++j) o.mu[i][j] = g.mu[i][j].get_d();
  }
  o.relative_error = 2.0 * std::numeric_limits<double>::epsilon();
  return o;
}

}  // namespace

Rational sq_norm_exact(const RationalVector& v) { return dot(v, v); }

double sq_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double to_double(const Rational& r) { return r.get_d(); }

mpz_class round_nearest(const Rational& r) {
  // floor((2p + q) / 2q)
  mpz_class num = 2 * r.get_num() + r.get_den();
  mpz_class den = 2 * r.get_den();
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

// ---------------------------------------------------------------- LatticeBasis

LatticeBasis::LatticeBasis(std::vector<RationalVector> columns) : columns_(std::move(columns)) {
  const std::size_t n = columns_.size();
  if (n == 0) throw SingularBasis("empty basis");
  for (const auto& c : columns_) {
    if (c.size() != n) throw SingularBasis("basis must be square (full rank)");
  }
  for (auto& c : columns_)
    for (auto& x : c) x.canonicalize();

  // Gauss-Jordan on [B | I] (B with columns as generators) for det and B^{-1}.
  std::vector<RationalVector> a(n, RationalVector(2 * n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r][c] = columns_[c][r];
    a[r][n + r] = 1;
  }
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw SingularBasis("basis vectors are linearly dependent");
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    Rational p = a[col][col];
    det *= p;
    for (auto& x : a[col]) x /= p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (std::size_t c = col; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  abs_det_ = abs(det);
  inverse_rows_.assign(n, RationalVector(n));
  inverse_d_.assign(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      inverse_rows_[r][c] = a[r][n + c];
      inverse_d_[r][c] = inverse_rows_[r][c].get_d();
    }

  columns_d_.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) columns_d_[i][k] = columns_[i][k].get_d();

  gso_ = round_gso(exact_gso(columns_));
  for (double s : gso_.sq_norms) {
    if (!(s >= 1e-30)) throw SingularBasis("Gram-Schmidt norm underflow");
  }
}

LatticeBasis LatticeBasis::from_columns(std::vector<RationalVector> columns) {
  return LatticeBasis(std::move(columns));
}

LatticeBasis LatticeBasis::from_integer_columns(const std::vector<IntVector>& columns) {
  std::vector<RationalVector> cols;
  cols.reserve(columns.size());
  for (const auto& c : columns) {
    RationalVector v;
    v.reserve(c.size());
    for (auto x : c) v.emplace_back(static_cast<long>(x));
    cols.push_back(std::move(v));
  }
  return LatticeBasis(std::move(cols));
}

LatticeBasis LatticeBasis::identity(int n) {
  std::vector<IntVector> cols(n, IntVector(n, 0));
  for (int i = 0; i < n; ++i) cols[i][i] = 1;
  return from_integer_columns(cols);
}

double LatticeBasis::max_gso_norm() const {
  double m = 0.0;
  for (double s : gso_.sq_norms) m = std::max(m, s);
  return std::sqrt(m);
}

RationalVector LatticeBasis::embed(std::span<const std::int64_t> coeffs) const {
  const int n = rank();
  RationalVector out(n, 0);
  for (int i = 0; i < n; ++i) {
    if (coeffs[i] == 0) continue;
    Rational z(static_cast<long>(coeffs[i]));
    for (int k = 0; k < n; ++k) out[k] += z * columns_[i][k];
  }
  return out;
}

std::vector<double> LatticeBasis::embed_double(std::span<const std::int64_t> coeffs) const {
  const int n = rank();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (coeffs[i] == 0) continue;
    const double z = static_cast<double>(coeffs[i]);
    for (int k = 0; k < n; ++k) out[k] += z * columns_d_[i][k];
  }
  return out;
}

std::vector<double> LatticeBasis::coordinates(std::span<const double> x) const {
  const int n = rank();
  std::vector<double> xi(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += inverse_d_[r][c] * x[c];
    xi[r] = acc;
  }
  return xi;
}

RationalVector LatticeBasis::coordinates_exact(const RationalVector& x) const {
  const int n = rank();
  RationalVector xi(n, 0);
  for (int r = 0; r < n; ++r) xi[r] = dot(inverse_rows_[r], x);
  return xi;
}

LatticeBasis LatticeBasis::scaled(const Rational& factor) const {
  auto cols = columns_;
  for (auto& c : cols)
    for (auto& x : c) x *= factor;
  return LatticeBasis(std::move(cols));
}

// ---------------------------------------------------------------- points

bool LatticePoint::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](std::int64_t z) { return z == 0; });
}

LatticePoint LatticePoint::operator+(const LatticePoint& other) const {
  LatticePoint out{coeffs};
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] += other.coeffs[i];
  return out;
}

LatticePoint LatticePoint::operator-(const LatticePoint& other) const {
  LatticePoint out{coeffs};
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] -= other.coeffs[i];
  return out;
}

LatticePoint LatticePoint::operator-() const { return scaled(-1); }

LatticePoint LatticePoint::scaled(std::int64_t k) const {
  LatticePoint out{coeffs};
  for (auto& z : out.coeffs) z *= k;
  return out;
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto z : p.coeffs) {
    h ^= static_cast<std::uint64_t>(z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

namespace {
std::int64_t mod_floor(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}
}  // namespace

CosetLabel CosetLabel::operator+(const CosetLabel& other) const {
  CosetLabel out{residues, modulus};
  for (std::size_t i = 0; i < residues.size(); ++i)
    out.residues[i] = mod_floor(residues[i] + other.residues[i], modulus);
  return out;
}

CosetLabel CosetLabel::operator-(const CosetLabel& other) const {
  CosetLabel out{residues, modulus};
  for (std::size_t i = 0; i < residues.size(); ++i)
    out.residues[i] = mod_floor(residues[i] - other.residues[i], modulus);
  return out;
}

bool CosetLabel::is_zero() const {
  return std::all_of(residues.begin(), residues.end(), [](std::int64_t r) { return r == 0; });
}

std::uint64_t CosetLabel::index() const {
  std::uint64_t idx = 0;
  for (auto it = residues.rbegin(); it != residues.rend(); ++it)
    idx = idx * static_cast<std::uint64_t>(modulus) + static_cast<std::uint64_t>(*it);
  return idx;
}

CosetLabel CosetLabel::from_index(std::uint64_t index, int n, std::int64_t q) {
  CosetLabel out{IntVector(n, 0), q};
  for (int i = 0; i < n; ++i) {
    out.residues[i] = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(q));
    index /= static_cast<std::uint64_t>(q);
  }
  return out;
}

CosetLabel CosetLabel::zero(int n, std::int64_t q) { return CosetLabel{IntVector(n, 0), q}; }

CosetLabel coset_label(const LatticePoint& point, std::int64_t q) {
  CosetLabel out{IntVector(point.coeffs.size()), q};
  for (std::size_t i = 0; i < point.coeffs.size(); ++i) out.residues[i] = mod_floor(point.coeffs[i], q);
  return out;
}

// ---------------------------------------------------------------- dual, GSO

DualBasis dual_basis(const LatticeBasis& basis) {
  // b*_i is row i of B^{-1}.
  return DualBasis{LatticeBasis::from_columns(basis.inverse_rows())};
}

bool pairing_is_identity(const DualBasis& dual, const LatticeBasis& basis) {
  const int n = basis.rank();
  if (dual.lattice.rank() != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (dot(dual.lattice.column(i), basis.column(j)) != (i == j ? 1 : 0)) return false;
    }
  return true;
}

Orthogonalization gram_schmidt(const LatticeBasis& basis) { return basis.gso(); }

// ---------------------------------------------------------------- LLL

LllReduction lll_reduce(const LatticeBasis& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw ConfigError("LLL delta must lie in (0.25, 1)");
  const int n = basis.rank();
  std::vector<RationalVector> b = basis.columns();
  std::vector<std::vector<mpz_class>> u(n, std::vector<mpz_class>(n, 0));  // u[i] = coeffs of b_i
  for (int i = 0; i < n; ++i) u[i][i] = 1;
  const Rational d(delta);

  ExactGso g = exact_gso(b);
  auto size_reduce = [&](int k, int j) {
    mpz_class r = round_nearest(g.mu[k][j]);
    if (r == 0) return;
    Rational rq(r);
    for (int c = 0; c < n; ++c) b[k][c] -= rq * b[j][c];
    for (int c = 0; c < n; ++c) u[k][c] -= r * u[j][c];
    for (int l = 0; l < j; ++l) g.mu[k][l] -= rq * g.mu[j][l];
    g.mu[k][j] -= rq;
  };

  int k = 1;
  while (k < n) {
    size_reduce(k, k - 1);
    if (g.sq_norms[k] < (d - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.sq_norms[k - 1]) {
      std::swap(b[k], b[k - 1]);
      std::swap(u[k], u[k - 1]);
      g = exact_gso(b);
      k = std::max(k - 1, 1);
    } else {
      for (int j = k - 2; j >= 0; --j) size_reduce(k, j);
      ++k;
    }
  }
  IntMatrix transform(n, IntVector(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) transform[j][i] = to_int64(u[i][j]);
  return LllReduction{LatticeBasis::from_columns(std::move(b)), std::move(transform)};
}

bool is_lll_reduced(const LatticeBasis& basis, double delta) {
  ExactGso g = exact_gso(basis.columns());
  const int n = basis.rank();
  const Rational half(1, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (abs(g.mu[i][j]) > half) return false;
  const Rational d(delta);
  for (int k = 1; k < n; ++k)
    if (g.sq_norms[k] < (d - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.sq_norms[k - 1]) return false;
  return true;
}

// ---------------------------------------------------------------- enumeration

struct LatticeEnumerator::ShortestCache {
  std::once_flag once;
  LatticePoint point;
  Rational sq_norm;
};

LatticeEnumerator::LatticeEnumerator(const LatticeBasis& basis, std::uint64_t node_budget)
    : basis_(basis),
      reduction_(lll_reduce(basis)),
      node_budget_(node_budget),
      shortest_(std::make_shared<ShortestCache>()) {}

IntVector LatticeEnumerator::to_original(const IntVector& reduced_coeffs) const {
  const int n = basis_.rank();
  IntVector out(n, 0);
  for (int j = 0; j < n; ++j) {
    std::int64_t acc = 0;
    for (int i = 0; i < n; ++i) acc += reduction_.transform[j][i] * reduced_coeffs[i];
    out[j] = acc;
  }
  return out;
}

void LatticeEnumerator::visit_within(
    std::span<const double> center, double radius,
    const std::function<void(const IntVector&, double)>& visit) const {
  if (!(radius > 0.0)) throw ConfigError("enumeration radius must be positive");
  const LatticeBasis& r = reduction_.basis;
  const int n = r.rank();
  const auto& gso = r.gso();
  const std::vector<double> x = r.coordinates(center);
  const double r2 = radius * radius * (1.0 + kBoundarySlack);

  IntVector z(n, 0);
  std::vector<double> diff(n, 0.0);  // z_i - x_i for fixed levels
  std::uint64_t nodes = 0;

  // Explicit recursion over levels n-1 .. 0.
  std::function<void(int, double)> rec = [&](int j, double partial) {
    double cj = x[j];
    for (int i = j + 1; i < n; ++i) cj -= gso.mu[i][j] * diff[i];
    const double rem = r2 - partial;
    if (rem < 0.0) return;
    const double w = std::sqrt(rem / gso.sq_norms[j]);
    const double lo_d = std::ceil(cj - w);
    const double hi_d = std::floor(cj + w);
    if (hi_d < lo_d) return;
    if (std::abs(lo_d) > 9e15 || std::abs(hi_d) > 9e15) throw BudgetExceeded("coefficient range overflow");
    for (auto zj = static_cast<std::int64_t>(lo_d); zj <= static_cast<std::int64_t>(hi_d); ++zj) {
      if (++nodes > node_budget_) throw BudgetExceeded("enumeration node budget exceeded");
      const double y = static_cast<double>(zj) - cj;
      const double np = partial + y * y * gso.sq_norms[j];
      if (np > r2) continue;
      z[j] = zj;
      diff[j] = static_cast<double>(zj) - x[j];
      if (j == 0) {
        visit(to_original(z), np);
      } else {
        rec(j - 1, np);
      }
    }
    z[j] = 0;
    diff[j] = 0.0;
  };
  rec(n - 1, 0.0);
}

Rational LatticeEnumerator::exact_sq_distance(const LatticePoint& p,
                                              std::span<const double> target) const {
  RationalVector e = basis_.embed(p.coeffs);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] -= Rational(target[k]);
  return sq_norm_exact(e);
}

std::vector<LatticePoint> LatticeEnumerator::within(std::span<const double> center,
                                                    double radius) const {
  const double r2 = radius * radius;
  const Rational r2_exact = Rational(radius) * Rational(radius);
  std::vector<LatticePoint> out;
  visit_within(center, radius, [&](const IntVector& coeffs, double sqd) {
    LatticePoint p{coeffs};
    if (sqd > r2 * (1.0 - kBoundarySlack)) {
      if (exact_sq_distance(p, center) > r2_exact) return;
    }
    out.push_back(std::move(p));
  });

  struct Keyed {
    double norm2;
    LatticePoint point;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(out.size());
  for (auto& p : out) keyed.push_back({sq_norm(basis_.embed_double(p.coeffs)), std::move(p)});
  std::sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    const double scale = std::max(a.norm2, b.norm2);
    if (std::abs(a.norm2 - b.norm2) > 1e-12 * scale) return a.norm2 < b.norm2;
    const Rational na = sq_norm_exact(basis_.embed(a.point.coeffs));
    const Rational nb = sq_norm_exact(basis_.embed(b.point.coeffs));
    if (na != nb) return na < nb;
    return a.point.coeffs < b.point.coeffs;
  });
  out.clear();
  for (auto& k : keyed) out.push_back(std::move(k.point));
  return out;
}

LatticePoint LatticeEnumerator::babai(std::span<const double> target) const {
  const LatticeBasis& r = reduction_.basis;
  const int n = r.rank();
  const auto& gso = r.gso();
  const std::vector<double> x = r.coordinates(target);
  IntVector z(n, 0);
  std::vector<double> diff(n, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    double cj = x[j];
    for (int i = j + 1; i < n; ++i) cj -= gso.mu[i][j] * diff[i];
    z[j] = static_cast<std::int64_t>(std::llround(cj));
    diff[j] = static_cast<double>(z[j]) - x[j];
  }
  return LatticePoint{to_original(z)};
}

namespace {

// Picks the exact minimizer of `key` among candidates whose floating key is
// within slack of the floating minimum; ties broken lexicographically.
template <typename ExactKey>
std::optional<std::pair<LatticePoint, Rational>> exact_argmin(
    const std::vector<std::pair<LatticePoint, double>>& cands, ExactKey exact_key) {
  if (cands.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, c.second);
  std::optional<std::pair<LatticePoint, Rational>> out;
  for (const auto& c : cands) {
    if (c.second > best * (1.0 + 1e-9) + 1e-300) continue;
    Rational k = exact_key(c.first);
    if (!out || k < out->second || (k == out->second && c.first.coeffs < out->first.coeffs)) {
      out = std::make_pair(c.first, k);
    }
  }
  return out;
}

}  // namespace

LatticePoint LatticeEnumerator::closest(std::span<const double> target) const {
  const LatticePoint start = babai(target);
  std::vector<double> e = basis_.embed_double(start.coeffs);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] -= target[k];
  double radius = std::sqrt(sq_norm(e)) * (1.0 + 1e-7) + 1e-12;
  std::vector<std::pair<LatticePoint, double>> cands;
  visit_within(target, radius, [&](const IntVector& coeffs, double sqd) {
    cands.emplace_back(LatticePoint{coeffs}, sqd);
  });
  auto best = exact_argmin(cands, [&](const LatticePoint& p) { return exact_sq_distance(p, target); });
  if (!best) return start;
  return best->first;
}

std::optional<LatticePoint> LatticeEnumerator::closest_within(std::span<const double> target,
                                                              double radius) const {
  std::vector<std::pair<LatticePoint, double>> cands;
  visit_within(target, radius, [&](const IntVector& coeffs, double sqd) {
    cands.emplace_back(LatticePoint{coeffs}, sqd);
  });
  auto best = exact_argmin(cands, [&](const LatticePoint& p) { return exact_sq_distance(p, target); });
  if (!best) return std::nullopt;
  if (best->second > Rational(radius) * Rational(radius)) return std::nullopt;
  return best->first;
}

const LatticeEnumerator::ShortestCache& LatticeEnumerator::shortest_cache() const {
  std::call_once(shortest_->once, [this] {
    const int n = basis_.rank();
    double radius = 0.0;
    for (const auto& col : reduction_.basis.columns_double()) {
      const double len = std::sqrt(sq_norm(col));
      radius = radius == 0.0 ? len : std::min(radius, len);
    }
    radius *= 1.0 + 1e-7;
    std::vector<double> origin(n, 0.0);
    std::vector<std::pair<LatticePoint, double>> cands;
    visit_within(origin, radius, [&](const IntVector& coeffs, double sqd) {
      LatticePoint p{coeffs};
      if (!p.is_zero()) cands.emplace_back(std::move(p), sqd);
    });
    auto best = exact_argmin(cands, [&](const LatticePoint& p) {
      return sq_norm_exact(basis_.embed(p.coeffs));
    });
    shortest_->point = best->first;
    shortest_->sq_norm = best->second;
  });
  return *shortest_;
}

const LatticePoint& LatticeEnumerator::shortest() const { return shortest_cache().point; }

const Rational& LatticeEnumerator::lambda1_squared() const { return shortest_cache().sq_norm; }

double LatticeEnumerator::lambda1() const { return std::sqrt(lambda1_squared().get_d()); }

std::vector<LatticePoint> enumerate_within(const LatticeBasis& basis, std::span<const double> center,
                                           double radius, std::uint64_t node_budget) {
  return LatticeEnumerator(basis, node_budget).within(center, radius);
}

LatticePoint shortest_vector_oracle(const LatticeBasis& basis, std::uint64_t node_budget) {
  return LatticeEnumerator(basis, node_budget).shortest();
}

// ---------------------------------------------------------------- I/O

LatticeBasis parse_basis(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (!toks.empty()) rows.push_back(std::move(toks));
  }
  if (rows.empty()) throw ParseError("basis file is empty");
  if (rows[0].size() != 1) throw ParseError("first line must hold the dimension n");
  int n = 0;
  try {
    n = std::stoi(rows[0][0]);
  } catch (const std::exception&) {
    throw ParseError("bad dimension '" + rows[0][0] + "'");
  }
  if (n <= 0) throw ParseError("dimension must be positive");
  if (static_cast<int>(rows.size()) != n + 1)
    throw ParseError("expected " + std::to_string(n) + " basis vectors, found " +
                     std::to_string(rows.size() - 1));
  std::vector<RationalVector> cols;
  for (int i = 1; i <= n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw ParseError("basis vector " + std::to_string(i) + " must have " + std::to_string(n) +
                       " entries");
    RationalVector v;
    for (const auto& t : rows[i]) v.push_back(parse_rational(t));
    cols.push_back(std::move(v));
  }
  return LatticeBasis::from_columns(std::move(cols));
}

LatticeBasis load_basis(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open basis file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_basis(ss.str());
}

std::string format_basis(const LatticeBasis& basis) {
  std::ostringstream out;
  out << basis.rank() << "\n";
  for (const auto& col : basis.columns()) {
    for (std::size_t k = 0; k < col.size(); ++k) out << (k ? " " : "") << col[k].get_str();
    out << "\n";
  }
  return out.str();
}

LatticeBasis random_integer_basis(int n, std::int64_t bound, RngStream& rng) {
  for (;;) {
    std::vector<IntVector> cols(n, IntVector(n));
    for (auto& c : cols)
      for (auto& x : c) x = rng.uniform_int(-bound, bound);
    try {
      return LatticeBasis::from_integer_columns(cols);
    } catch (const SingularBasis&) {
    }
  }
}

}  // namespace lbdd
