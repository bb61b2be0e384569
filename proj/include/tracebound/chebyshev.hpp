#pragma once

#include <functional>
#include <vector>

#include "tracebound/quadrature.hpp"

namespace tracebound {

/// Measure on one interval with density w(y) / (pi sqrt((b - y)(y - a))),
/// where the smooth weight w = sum beta_n T_n((y - m) / c).
/// Potentials, moments and kernel derivatives follow in closed form from the
/// Chebyshev coefficients.
struct ChebPiece {
  Interval iv{0.0, 1.0};
  std::vector<double> beta;

  double weight(double y) const;
  double mass() const { return beta.empty() ? 0.0 : beta[0]; }
  double mean() const;
  /// int log|x - y| dmu(y), any real x.
  double log_potential(double x) const;
  /// d/dx of the potential; x outside the interval.
  double log_potential_d1(double x) const;
  /// d^2/dx^2 of the potential; x outside the interval. Equals -int dmu/(x-y)^2.
  double log_potential_d2(double x) const;
};

/// Sample abscissae y_j = m + c cos((j + 1/2) pi / n).
std::vector<double> chebyshev_nodes(Interval iv, int n);

/// Coefficients from weight values at chebyshev_nodes(iv, values.size()).
ChebPiece chebyshev_from_values(Interval iv, const std::vector<double>& values);

/// Adaptive fit: doubles n from start_n until the upper half of the
/// coefficients falls below tol relative to the largest one.
ChebPiece chebyshev_fit(const std::function<double(double)>& w, Interval iv, int start_n = 32, double tol = 1e-14,
                        int max_n = 1 << 16);

/// Coefficientwise sum of pieces on the same interval.
ChebPiece combine(const std::vector<std::pair<double, const ChebPiece*>>& terms);

}  // namespace tracebound
