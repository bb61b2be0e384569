#pragma once

namespace tracebound {

/// Single-interval family alpha f + beta g + gamma h on [a, b] where f is the
/// equilibrium density, g the log-potential density with pole 0 and h the
/// zero-mass linear-potential density.
struct IntervalFamilyParams {
  double a = 0.0;
  double b = 1.0;
  double alpha = 1.0;
  double gamma = 0.0;

  IntervalFamilyParams() = default;
  IntervalFamilyParams(double a_, double b_, double alpha_, double gamma_);

  double beta() const { return 1.0 - alpha; }
  double m() const { return 0.5 * (a + b); }
  double c() const { return 0.5 * (b - a); }
  double g() const;
  /// Density of the combination at x in (a, b).
  double density(double x) const;
  /// Minimum of the density numerator over Chebyshev samples; >= 0 for a positive measure.
  double min_density_numerator(int samples = 64) const;
};

double family_expectation(const IntervalFamilyParams& p);
double family_log_moment(const IntervalFamilyParams& p);
double family_energy(const IntervalFamilyParams& p);
double family_potential(const IntervalFamilyParams& p, double x);

struct VanishingParams {
  double alpha, beta, gamma;
};

/// The family member whose density vanishes at both endpoints.
VanishingParams boundary_vanishing_params(double a, double b);

struct SchurSolution {
  double lambda, a, b;
};

/// A = {}: support [0, 4 sqrt(e)], lambda = sqrt(e).
SchurSolution solve_schur();

struct SiegelSolution {
  double E;   // lambda for A = {x}
  double g;   // sqrt(ab)
  double nu;  // E = e (1 + 1/nu)^(-nu)
  double a, b;
};

/// A = {x}: solves E log E - E = g log g - g and g log g = (g - E) log(E - g).
SiegelSolution solve_siegel(double tol = 1e-14);

/// Residuals of the two defining equations at (E, g).
double siegel_residual_energy(double E, double g);
double siegel_residual_log(double E, double g);
/// (1 + nu) log(1 + 1/nu) + log(nu) / (1 + nu) - 1.
double siegel_nu_residual(double nu);

/// y2(x) - y1(x) from the monotone curve argument; one sign change on (0, 1).
double siegel_curve_gap(double x);

}  // namespace tracebound
