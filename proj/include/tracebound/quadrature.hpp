#pragma once

#include <functional>
#include <vector>

namespace tracebound {

struct Interval {
  double lo;
  double hi;
  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Finite union of closed intervals [a0,a1] u [a2,a3] u ...
class SupportSet {
 public:
  SupportSet() = default;
  /// Validates ordering and the [lo_bound, hi_bound] containment.
  explicit SupportSet(std::vector<double> endpoints, double lo_bound = 0.0, double hi_bound = 18.0);

  /// Skips the containment check; used for Moebius images and test supports.
  static SupportSet unchecked(std::vector<double> endpoints);

  const std::vector<double>& endpoints() const { return a_; }
  std::size_t interval_count() const { return a_.size() / 2; }
  std::size_t gap_count() const { return interval_count() - 1; }
  Interval interval(std::size_t k) const { return {a_[2 * k], a_[2 * k + 1]}; }
  Interval gap(std::size_t i) const { return {a_[2 * i + 1], a_[2 * i + 2]}; }
  double lo() const { return a_.front(); }
  double hi() const { return a_.back(); }

  /// Index of the interval containing x, or -1.
  int locate(double x) const;
  bool contains(double x) const { return locate(x) >= 0; }

  /// sqrt(|H(x)| / ((x - a_j)(x - a_{j+1}))) in product form, skipping the
  /// two endpoints with indices j and j + 1.
  double sqrt_abs_h_rest(double x, std::size_t j) const;
  /// |H(x)| for H = prod (x - a_i).
  double abs_h(double x) const;

 private:
  static void validate_order(const std::vector<double>& a);
  std::vector<double> a_;
};

struct QuadratureConfig {
  int nodes_per_interval = 256;
  double refinement_tol = 1e-12;
  void validate() const;
};

/// Value and convergence history of a singular integral.
struct SingularIntegral {
  double value = 0.0;
  int nodes = 0;
  std::vector<double> deltas;  // |I_2N - I_N| per doubling
};

/// int_a^b g(x) / sqrt((b - x)(x - a)) dx with the midpoint rule in theta,
/// x = m + c cos(theta), doubling nodes until successive values agree.
SingularIntegral integrate_singular_detailed(const std::function<double(double)>& g, Interval iv,
                                             const QuadratureConfig& cfg);
double integrate_singular(const std::function<double(double)>& g, Interval iv, const QuadratureConfig& cfg);

/// sum over intervals of int g(x) / sqrt(|H(x)|) dx, H = prod (x - a_i).
/// The leading coefficient of H is taken as one.
double integrate_singular_union(const std::function<double(double)>& g, const SupportSet& sigma,
                                const QuadratureConfig& cfg);

/// Adaptive Gauss-Kronrod (7/15) with absolute tolerance tol.
double integrate_smooth(const std::function<double(double)>& g, Interval iv, double tol);

}  // namespace tracebound
