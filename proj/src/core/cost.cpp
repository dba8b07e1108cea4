#include "core/cost.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>
#include <numbers>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace lbdd {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAMax = 6.0;
const double kLargePeak = 1.0 / (2.0 * kLn2);

const char* family_name(CurveFamily f) {
  switch (f) {
    case CurveFamily::kCapSmallEps: return "cap-small-eps";
    case CurveFamily::kCapLargeEps: return "cap-large-eps";
    case CurveFamily::kMinfind: return "minfind";
  }
  return "?";
}

// Golden section on [lo, hi] seeded by a grid scan.
std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kGrid = 4000;
  int best = -1;
  double best_v = kInf;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  if (best < 0) return {lo, kInf};
  const double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  const double c = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  // 52 bits: full double precision on the bracket.
  auto [x, v] = boost::math::tools::brent_find_minima(f, a, c, 52);
  if (v <= best_v) return {x, v};
  return {lo + (hi - lo) * best / kGrid, best_v};
}

}  // namespace

std::string CurveVariant::name() const {
  return fmt::format("{}-{}", family_name(family), quantum ? "quantum" : "classical");
}

CurveVariant CurveVariant::parse(const std::string& name) {
  for (const auto& v : all())
    if (v.name() == name) return v;
  throw ConfigError("unknown curve variant: " + name);
}

std::vector<CurveVariant> CurveVariant::all() {
  std::vector<CurveVariant> out;
  for (auto f : {CurveFamily::kCapSmallEps, CurveFamily::kCapLargeEps, CurveFamily::kMinfind})
    for (bool q : {false, true}) out.push_back({f, q});
  return out;
}

double small_eps_min_A(double b) { return std::max(0.8 * b, kLargePeak - b); }

double alpha_small_eps(double A, double b) {
  if (A < small_eps_min_A(b) * (1.0 - 1e-12) || A + b <= 0)
    throw OutOfDomain(fmt::format("small-eps formula needs A >= {:.6f} (got {:.6f})", small_eps_min_A(b), A));
  return 0.5 * std::sqrt(A / (A + b));
}

double alpha_large_eps(double A, double b) {
  if (A <= 0) return 0.0;
  return 1.0 / (2.0 * std::exp2(b)) * std::exp2(-A) * std::sqrt(A) * std::sqrt(2.0 * std::numbers::e * kLn2);
}

std::optional<double> large_eps_root(double b, double target) {
  // Increasing on (0, 1/(2 ln 2)].
  if (alpha_large_eps(kLargePeak, b) < target) return std::nullopt;
  double lo = 0.0, hi = kLargePeak;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (alpha_large_eps(mid, b) < target ? lo : hi) = mid;
  }
  return hi;
}

CapGeometry cap_angle(double alpha, CapPolicy policy) {
  if (!(alpha > 0.25 && alpha <= 0.5))
    throw OutOfDomain(fmt::format("cap geometry needs alpha in (1/4, 1/2], got {}", alpha));
  const double a2 = 4.0 * alpha * alpha;
  CapGeometry g;
  g.r = policy == CapPolicy::kAlpha ? alpha : std::min(alpha, std::sqrt(std::max(0.0, 1.0 - a2)));
  if (g.r <= 0.0) {
    // alpha = 1/2 with r = 0: the decoding ball reaches every shortest vector.
    g.phi = std::numbers::pi / 2;
    return g;
  }
  const double c = (1.0 + g.r * g.r - a2) / (2.0 * g.r);
  g.phi = c >= 1.0 ? 0.0 : c <= 0.0 ? std::numbers::pi / 2 : std::acos(c);
  return g;
}

double cap_fraction_exponent(double phi) {
  if (!(phi > 0 && phi <= std::numbers::pi / 2 + 1e-15))
    throw OutOfDomain(fmt::format("cap exponent needs phi in (0, pi/2], got {}", phi));
  return -std::log2(std::sin(phi));
}

double cap_fraction_exponent_quadrature(double phi, int n) {
  using boost::math::quadrature::gauss_kronrod;
  // Integrate sin^{n-2} scaled by its maximum on the range to avoid underflow.
  auto f = [n](double t) { return std::pow(std::sin(t), n - 2); };
  const double cap = gauss_kronrod<double, 61>::integrate(f, 0.0, phi, 15, 1e-12);
  const double all = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-12);
  return (-std::log2(cap / all) - 0.5 * std::log2(static_cast<double>(n))) / n;
}

CostPoint capping_point(double A, double b, EpsRegime regime, bool quantum, CapPolicy policy) {
  CostPoint p;
  p.b = b;
  p.A = A;
  p.c = kInf;
  p.feasible = false;
  if (regime == EpsRegime::kSmall) {
    if (A < small_eps_min_A(b) * (1.0 - 1e-12)) return p;
    p.alpha = alpha_small_eps(A, b);
  } else {
    p.alpha = alpha_large_eps(A, b);
  }
  if (p.alpha < 1.0 / 3.0 || p.alpha > 0.5) return p;
  const auto g = cap_angle(p.alpha, policy);
  p.r = g.r;
  p.phi = g.phi;
  if (p.phi <= 0.0) return p;
  const double e0 = quantum ? 0.5 : 1.0;
  p.c = e0 + A / 2.0 + e0 * cap_fraction_exponent(p.phi);
  p.feasible = true;
  return p;
}

double capping_cost(double A, double b, EpsRegime regime, bool quantum, CapPolicy policy) {
  return capping_point(A, b, regime, quantum, policy).c;
}

CostPoint capping_exponent(double b, EpsRegime regime, bool quantum, CapPolicy policy) {
  const double lo = regime == EpsRegime::kSmall ? small_eps_min_A(b) : 1e-9;
  auto [A, c] = minimize([&](double x) { return capping_cost(x, b, regime, quantum, policy); }, lo, kAMax);
  if (!std::isfinite(c)) throw Infeasible(fmt::format("no feasible eps exponent at b = {}", b));
  return capping_point(A, b, regime, quantum, policy);
}

CostPoint minfind_exponent(double b, bool quantum) {
  std::optional<double> A = large_eps_root(b);
  const double small = small_eps_min_A(b);
  if (alpha_small_eps(small, b) >= 1.0 / 3.0 - 1e-12 && (!A || small < *A)) A = small;
  if (!A) throw Infeasible(fmt::format("no eps exponent reaches alpha = 1/3 at b = {}", b));
  CostPoint p;
  p.b = b;
  p.A = *A;
  p.alpha = 1.0 / 3.0;
  p.c = (quantum ? 0.5 : 1.0) * std::log2(3.0) + *A / 2.0;
  return p;
}

CostPoint curve_point(const CurveVariant& v, double b, CapPolicy policy) {
  switch (v.family) {
    case CurveFamily::kCapSmallEps: return capping_exponent(b, EpsRegime::kSmall, v.quantum, policy);
    case CurveFamily::kCapLargeEps: return capping_exponent(b, EpsRegime::kLarge, v.quantum, policy);
    case CurveFamily::kMinfind: return minfind_exponent(b, v.quantum);
  }
  throw ConfigError("bad curve family");
}

std::vector<CostPoint> emit_curve(const CurveVariant& v, double step, CapPolicy policy, int workers) {
  if (!(step > 0)) throw ConfigError("curve step must be positive");
  const auto count = static_cast<std::uint64_t>(std::floor(kKissingExponent / step + 1e-9)) + 1;
  using Rows = std::vector<std::pair<std::uint64_t, CostPoint>>;
  auto rows = parallel_reduce(
      count, workers, Rows{},
      [&](Rows& acc, std::uint64_t i) {
        const double b = std::min(kKissingExponent, static_cast<double>(i) * step);
        CostPoint p;
        try {
          p = curve_point(v, b, policy);
        } catch (const Infeasible&) {
          p.b = b;
          p.c = kInf;
          p.feasible = false;
        }
        acc.emplace_back(i, p);
      },
      [](Rows& a, Rows&& b) { a.insert(a.end(), b.begin(), b.end()); });
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<CostPoint> out;
  for (auto& [i, p] : rows) out.push_back(p);
  return out;
}

std::string curve_csv(const std::vector<CostPoint>& rows) {
  std::string out = "b,c\n";
  for (const auto& p : rows)
    out += p.feasible ? fmt::format("{:.6f},{:.6f}\n", p.b, p.c) : fmt::format("{:.6f},nan\n", p.b);
  return out;
}

}  // namespace lbdd
