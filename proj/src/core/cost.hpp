#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lbdd {

// Kissing-number exponent endpoint: beta = 2^0.402.
inline constexpr double kKissingExponent = 0.402;
inline constexpr double kCurveStep = 0.002;

enum class EpsRegime { kSmall, kLarge };
enum class CapPolicy { kAlpha, kOptimal };
enum class CurveFamily { kCapSmallEps, kCapLargeEps, kMinfind };

struct CurveVariant {
  CurveFamily family = CurveFamily::kCapSmallEps;
  bool quantum = false;

  // e.g. "cap-small-eps-classical", "minfind-quantum"
  std::string name() const;
  static CurveVariant parse(const std::string& name);
  static std::vector<CurveVariant> all();
};

// Decoding coefficient when eps = 2^{-An} is small: (1/2) sqrt(A/(A+b)).
// Throws OutOfDomain unless A >= max(4b/5, 1/(2 ln 2) - b).
double alpha_small_eps(double A, double b);
double small_eps_min_A(double b);

// Large-eps decoding coefficient (1/(2 beta)) 2^{-A} sqrt(A) sqrt(2 e ln 2).
double alpha_large_eps(double A, double b);
// Smallest A in (0, 1/(2 ln 2)] with alpha_large_eps(A, b) = target, or
// nothing when the maximum over A stays below target.
std::optional<double> large_eps_root(double b, double target = 1.0 / 3.0);

struct CapGeometry {
  double r = 0.0;
  double phi = 0.0;
};

// Cap centre radius r (units of lambda1) and half-angle phi with
// cos phi = (1 + r^2 - 4 alpha^2) / (2r), clamped to [0, pi/2].
// Throws OutOfDomain unless 1/4 < alpha <= 1/2.
CapGeometry cap_angle(double alpha, CapPolicy policy);

// -log2 sin phi. Throws OutOfDomain unless 0 < phi <= pi/2.
double cap_fraction_exponent(double phi);
// Finite-n version from the angle density sin^{n-2}: (-log2 F - log2(n)/2) / n
// where F is the normalized cap mass.
double cap_fraction_exponent_quadrature(double phi, int n);

struct CostPoint {
  double b = 0.0;
  double A = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double c = 0.0;
  bool feasible = true;
};

// e0 + A/2 + g * cap_fraction_exponent(phi), (e0, g) = (1, 1) classical and
// (1/2, 1/2) quantum; +inf when alpha < 1/3 or the cap is empty.
double capping_cost(double A, double b, EpsRegime regime, bool quantum, CapPolicy policy);
CostPoint capping_point(double A, double b, EpsRegime regime, bool quantum, CapPolicy policy);

// Minimizes capping_cost over A (grid bracket, then golden section).
// Throws Infeasible when no A gives a finite cost.
CostPoint capping_exponent(double b, EpsRegime regime, bool quantum,
                           CapPolicy policy = CapPolicy::kOptimal);

// c = log2(3) (or log2(3)/2) + A/2 with A the smallest eps exponent reaching
// alpha = 1/3 in either regime.
CostPoint minfind_exponent(double b, bool quantum);

CostPoint curve_point(const CurveVariant& v, double b, CapPolicy policy = CapPolicy::kOptimal);

// Rows at b = 0, step, ..., kKissingExponent; infeasible rows are kept.
std::vector<CostPoint> emit_curve(const CurveVariant& v, double step = kCurveStep,
                                  CapPolicy policy = CapPolicy::kOptimal, int workers = 1);
// "b,c" header, 6-decimal fixed point; infeasible rows carry "nan".
std::string curve_csv(const std::vector<CostPoint>& rows);

// BDD costs for eps = 2^{-An}: per query A/2, oracle build 1/2 + A/2.
inline double bdd_query_exponent(double A) { return A / 2.0; }
inline double bdd_build_exponent(double A) { return 0.5 + A / 2.0; }

}  // namespace lbdd
