#include "tracebound/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "tracebound/errors.hpp"

namespace tracebound {

namespace {

constexpr double kPi = std::numbers::pi;

void require_left(const IntervalFamilyParams& p) {
  if (p.a == 0.0 && p.beta() != 0.0) throw DegenerateLeftEndpoint("log-pole component needs a > 0");
}

// Root of f on [lo, hi] to full precision; f(lo) and f(hi) must differ in sign.
template <class F>
double bracketed_root(F f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw NoRoot("bracket does not contain a sign change");
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
  std::uintmax_t iters = 300;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

// y > 1 with y log y - y = x log x - x.
double curve_y1(double x) {
  double v = x * std::log(x) - x;
  return bracketed_root([v](double y) { return y * std::log(y) - y - v; }, 1.0, 3.0);
}

// y with (y - x) log(y - x) = -x log x and y - x > 1.
double curve_y2(double x) {
  double w = -x * std::log(x);
  return x + bracketed_root([w](double z) { return z * std::log(z) - w; }, 1.0, 3.0);
}

}  // namespace

IntervalFamilyParams::IntervalFamilyParams(double a_, double b_, double alpha_, double gamma_)
    : a(a_), b(b_), alpha(alpha_), gamma(gamma_) {
  if (!(a >= 0.0 && b > a)) throw InvalidArgument("family needs 0 <= a < b");
}

double IntervalFamilyParams::g() const { return std::sqrt(a * b); }

double IntervalFamilyParams::density(double x) const {
  if (!(x > a && x < b)) return 0.0;
  double num = alpha + gamma * (m() - x);
  if (beta() != 0.0) num += beta() * g() / x;
  return num / (kPi * std::sqrt((b - x) * (x - a)));
}

double IntervalFamilyParams::min_density_numerator(int samples) const {
  double mn = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    double x = m() - c() * std::cos((j + 0.5) * kPi / samples);
    double num = alpha + gamma * (m() - x);
    if (beta() != 0.0) num += beta() * g() / x;
    mn = std::min(mn, num);
  }
  return mn;
}

double family_expectation(const IntervalFamilyParams& p) {
  const double g = p.g();
  return g + p.alpha * (p.m() - g) - p.gamma * p.c() * p.c() / 2.0;
}

double family_log_moment(const IntervalFamilyParams& p) {
  require_left(p);
  const double a = p.a, b = p.b, g = p.g();
  const double s = a + b + 2.0 * g;
  double out = p.alpha * std::log(s / 4.0) + p.gamma * (g - p.m());
  if (p.beta() != 0.0) out += p.beta() * std::log(4.0 * a * b / s);
  return out;
}

double family_energy(const IntervalFamilyParams& p) {
  require_left(p);
  const double m = p.m(), c = p.c(), g = p.g(), beta = p.beta();
  double out = std::log(c / 2.0) - p.gamma * p.gamma * c * c / 2.0;
  if (beta != 0.0) {
    out -= 2.0 * beta * beta * std::log((m + g) / (2.0 * g));
    out -= 2.0 * beta * p.gamma * (m - g);
  }
  return out;
}

double family_potential(const IntervalFamilyParams& p, double x) {
  const double a = p.a, b = p.b, g = p.g(), beta = p.beta();
  double out = p.gamma * x + p.alpha * std::log(p.c() / 2.0) - p.gamma * p.m();
  if (beta != 0.0) {
    require_left(p);
    out += beta * std::log(x) - beta * std::log((a + b + 2.0 * g) / (b - a));
  }
  return out;
}

VanishingParams boundary_vanishing_params(double a, double b) {
  if (!(a >= 0.0 && b > a)) throw InvalidArgument("need 0 <= a < b");
  const double m = 0.5 * (a + b), g = std::sqrt(a * b);
  return {m / (m - g), -g / (m - g), 1.0 / (m - g)};
}

SchurSolution solve_schur() {
  const double e_half = std::exp(0.5);
  return {e_half, 0.0, 4.0 * e_half};
}

double siegel_residual_energy(double E, double g) { return E * std::log(E) - E - (g * std::log(g) - g); }

double siegel_residual_log(double E, double g) { return g * std::log(g) - (g - E) * std::log(E - g); }

double siegel_nu_residual(double nu) {
  return (1.0 + nu) * std::log1p(1.0 / nu) + std::log(nu) / (1.0 + nu) - 1.0;
}

double siegel_curve_gap(double x) { return curve_y2(x) - curve_y1(x); }

SiegelSolution solve_siegel(double tol) {
  if (!(tol > 0)) throw InvalidArgument("tolerance must be positive");
  // y1 decreases and y2 increases on (0, 1), so their difference has one root.
  const double lo = 1e-9, hi = 1.0 - 1e-9;
  double x = bracketed_root(siegel_curve_gap, lo, hi);
  SiegelSolution s;
  s.g = x;
  s.E = curve_y1(x);
  if (std::abs(siegel_residual_energy(s.E, s.g)) > tol || std::abs(siegel_residual_log(s.E, s.g)) > tol)
    throw NoRoot("Siegel system residual above tolerance");
  s.nu = s.g / (s.E - s.g);
  const double r = 1.0 / std::sqrt(s.nu + 1.0);
  s.a = s.E * (1.0 - r) * (1.0 - r);
  s.b = s.E * (1.0 + r) * (1.0 + r);
  return s;
}

}  // namespace tracebound
