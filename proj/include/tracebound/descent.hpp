#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tracebound/measures.hpp"
#include "tracebound/polynomial.hpp"
#include "tracebound/quadrature.hpp"

namespace tracebound {

struct DescentState {
  std::vector<double> endpoints;
  std::vector<double> residuals;
  double objective = 0.0;
  long iteration = 0;
};

struct DescentConfig {
  double fd_step = 1e-6;
  long max_iters = 100000;
  double objective_tol = 1e-16;
  double shrink = 0.5;                 // backtracking factor
  double sufficient_decrease = 1e-4;   // Armijo constant
  int max_backtracks = 60;
  double min_separation = 1e-6;        // endpoints closer than this reject a step
  bool normalized_boundary = true;     // boundary densities divided by the equilibrium density
  unsigned threads = 0;                // 0: hardware concurrency
  QuadratureConfig quadrature;
  /// Called after every accepted step with the new state and lambda.
  std::function<void(const DescentState&, const MeasureBundle&)> on_iteration;

  void validate() const;
};

/// [I(mu), boundary densities at the free endpoints, log moments].
std::vector<double> residuals(const MeasureBundle& mu, bool normalized_boundary = true);
std::vector<double> residuals(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys,
                              const QuadratureConfig& cfg = {}, bool normalized_boundary = true);
double objective(const std::vector<double>& r);

struct Gradient {
  std::vector<double> values;
  std::vector<bool> usable;  // false where a perturbed construction failed
};

/// Central differences of the objective, coordinates evaluated in parallel.
Gradient gradient(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys, const DescentConfig& cfg);

struct DescentResult {
  DescentState state;
  MeasureBundle bundle;
  bool converged = false;  // objective below tolerance
  std::vector<double> objective_history;
};

/// Backtracking gradient descent on the endpoints. Throws Stalled when no
/// step along the negative gradient decreases the objective.
DescentResult run_descent(const SupportSet& init, const std::vector<IntegerPolynomial>& polys,
                          const DescentConfig& cfg = {});

/// Intervals between consecutive roots of prod Q with 5% margins; the last
/// interval extends to 6.6 (or past the largest root).
SupportSet default_init(const std::vector<IntegerPolynomial>& polys);

}  // namespace tracebound
