#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracebound/chebyshev.hpp"
#include "tracebound/polynomial.hpp"
#include "tracebound/quadrature.hpp"

namespace tracebound {

/// Measure on a SupportSet whose density on interval k is
/// w_k(y) / (pi sqrt((b_k - y)(y - a_k))) with a smooth weight w_k.
/// Every measure built here has this shape: the inverse square root carries
/// the endpoint behaviour and w_k is analytic on a neighbourhood of the
/// interval. Chebyshev expansions of w_k are fitted on first use.
class SqrtMeasure {
 public:
  using Weight = std::function<double(std::size_t k, double y)>;

  SqrtMeasure() = default;
  SqrtMeasure(SupportSet support, Weight weight, double fit_tol = 1e-14);
  static SqrtMeasure from_pieces(SupportSet support, std::vector<ChebPiece> pieces);
  /// sum_i coeff_i * mu_i on a shared support.
  static SqrtMeasure linear_combination(const std::vector<std::pair<double, const SqrtMeasure*>>& terms);

  const SupportSet& support() const { return support_; }
  double weight(std::size_t k, double y) const { return weight_(k, y); }
  /// Density with respect to dx; zero off the support, infinite at endpoints
  /// unless the weight vanishes there.
  double density(double x) const;

  const std::vector<ChebPiece>& pieces() const;

  double mass() const;
  double mean() const;
  double potential(double x) const;
  /// First and second derivatives of the potential at x off the support.
  double potential_d1(double x) const;
  double potential_d2(double x) const;
  /// I(mu) = int int log|x - y| dmu dmu.
  double energy() const;

 private:
  SupportSet support_;
  Weight weight_;
  double fit_tol_ = 1e-14;
  mutable std::optional<std::vector<ChebPiece>> pieces_;
};

/// Roots of the equilibrium numerator, one per gap, in ascending order.
std::vector<double> equilibrium_roots(const SupportSet& sigma, const QuadratureConfig& cfg = {});

struct EquilibriumMeasure {
  SqrtMeasure measure;
  std::vector<double> roots;  // p_eq(x) = prod (x - roots_i)
  double constant = 0.0;      // potential on the support
};

EquilibriumMeasure equilibrium_measure(const SupportSet& sigma, const QuadratureConfig& cfg = {});

/// Log capacity: the equilibrium potential on the support.
double capacity_constant(const SupportSet& sigma, const QuadratureConfig& cfg = {});

/// Probability measure on sigma with potential log|x - alpha| + constant on sigma.
struct LogPotentialMeasure {
  double alpha = 0.0;
  SqrtMeasure measure;
  double constant = 0.0;
  std::vector<double> image_roots;  // equilibrium roots on the image 1/(sigma - alpha)
  double scale = 0.0;               // sqrt(|H(alpha)|)
};

LogPotentialMeasure log_potential_measure(const SupportSet& sigma, double alpha, const QuadratureConfig& cfg = {});

/// Weight of the log-potential measure from its image roots; shared with the bundle.
double log_potential_weight(const SupportSet& sigma, double alpha, double scale, const std::vector<double>& image_roots,
                            std::size_t k, double y);

/// Image-side equilibrium roots for the pole alpha.
std::vector<double> log_potential_image_roots(const SupportSet& sigma, double alpha, const QuadratureConfig& cfg);

/// (1 / deg Q) sum over roots of Q of the log-potential measures; potential
/// log|Q(x)| / deg Q + constant on sigma.
struct PolynomialMeasure {
  IntegerPolynomial poly;
  std::vector<LogPotentialMeasure> parts;
  SqrtMeasure measure;
  double constant = 0.0;
};

PolynomialMeasure measure_for_polynomial(const SupportSet& sigma, const IntegerPolynomial& q,
                                         const QuadratureConfig& cfg = {});

/// Signed measure with potential x + offset on sigma. Its mass is minus the
/// mean of the equilibrium measure: the zero-mass correction keeps the
/// offsets equal across intervals without adding equilibrium mass.
struct LinearPotentialMeasure {
  SqrtMeasure measure;
  double offset = 0.0;
  double mass = 0.0;
  std::vector<double> eq_roots;
  std::vector<double> gammas;  // weights of prod_{i != j}(x - eq_roots_i)
};

LinearPotentialMeasure linear_potential_measure(const SupportSet& sigma, const QuadratureConfig& cfg = {});

/// Correction weights of the linear measure given the equilibrium roots.
std::vector<double> linear_correction(const SupportSet& sigma, const std::vector<double>& eq_roots,
                                      const QuadratureConfig& cfg);

struct CandidateOptions {
  /// Throw NegativeDensity if the combined weight is clearly negative inside the support.
  bool require_positive = false;
};

/// The candidate optimal measure for (sigma, A): the combination
/// X_eq mu_eq + X_lin mu_lin + sum X_Q mu_Q whose density is c sqrt|H| / prod|Q|
/// once the endpoints are optimal. With A empty the support must be a single
/// interval pinned at 0 and the target density is c sqrt((b - x) / x).
class MeasureBundle {
 public:
  struct Root {
    double alpha;
    std::size_t poly;  // index into polys()
    double scale;
    std::vector<double> image_roots;
  };

  const SupportSet& support() const { return sigma_; }
  const std::vector<IntegerPolynomial>& polys() const { return polys_; }
  bool pinned() const { return polys_.empty(); }
  const std::vector<Root>& roots() const { return roots_; }
  const std::vector<double>& eq_roots() const { return eq_roots_; }

  double c() const { return c_; }
  double x_eq() const { return x_eq_; }
  double x_lin() const { return x_lin_; }
  const std::vector<double>& x_q() const { return x_q_; }
  double lin_mass() const { return lin_mass_; }

  double lambda0() const { return 1.0 / x_lin_; }
  double lambda_q(std::size_t j) const { return -x_q_[j] / (x_lin_ * polys_[j].degree()); }
  /// lambda with x - lambda - sum lambda_Q log|Q| - lambda0 (U - I/2) = 0 on the support.
  double lambda() const { return (0.5 * energy_ - total_constant_) / x_lin_; }

  /// Combined measure and its summary values.
  const SqrtMeasure& measure() const { return mu_; }
  double mass() const { return mass_; }
  double mean() const { return mean_; }
  double energy() const { return energy_; }
  double total_constant() const { return total_constant_; }
  const std::vector<double>& log_moments() const { return log_moments_; }
  /// Limit of density / equilibrium density at each endpoint.
  const std::vector<double>& boundary_ratios() const { return boundary_ratios_; }

  /// Potential on the support via the closed form
  /// total_constant + X_lin x + sum X_Q log|Q(x)| / deg Q.
  double support_potential(double x) const;
  /// Potential anywhere, from the fitted combined measure.
  double potential(double x) const { return mu_.potential(x); }

  // Smooth weights of the pieces, interval k.
  double eq_weight(std::size_t k, double y) const;
  double lin_weight(std::size_t k, double y) const;
  double root_weight(std::size_t r, std::size_t k, double y) const;
  double combined_weight(std::size_t k, double y) const;
  double target_weight(std::size_t k, double y) const;
  /// c sqrt|H(x)| / prod |Q(x)| on the support, zero elsewhere.
  double target_density(double x) const;

  /// Equilibrium measure of the support, fitted on first use.
  const SqrtMeasure& equilibrium() const;

  friend MeasureBundle candidate_measure(const SupportSet&, const std::vector<IntegerPolynomial>&,
                                         const QuadratureConfig&, const CandidateOptions&);

 private:
  double interval_sign(std::size_t k) const;

  SupportSet sigma_;
  std::vector<IntegerPolynomial> polys_;
  std::vector<Root> roots_;
  std::vector<double> eq_roots_, lin_gammas_;
  double c_ = 0, x_eq_ = 0, x_lin_ = 0, lin_mass_ = 0;
  std::vector<double> x_q_;
  SqrtMeasure mu_;
  mutable std::shared_ptr<SqrtMeasure> eq_;
  double mass_ = 0, mean_ = 0, energy_ = 0, total_constant_ = 0;
  std::vector<double> log_moments_, boundary_ratios_;
};

MeasureBundle candidate_measure(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys,
                                const QuadratureConfig& cfg = {}, const CandidateOptions& opts = {});

/// All real roots of q, requiring every root to be real and simple.
std::vector<double> polynomial_roots(const IntegerPolynomial& q);

double potential_at(const SqrtMeasure& mu, double x);
double potential_at(const MeasureBundle& mu, double x);
double energy(const SqrtMeasure& mu);
double energy(const MeasureBundle& mu);
/// int log|Q| dmu = log|lc(Q)| + sum over roots of the potential.
double log_moment(const SqrtMeasure& mu, const IntegerPolynomial& q);
double log_moment(const MeasureBundle& mu, const IntegerPolynomial& q);
double expectation(const SqrtMeasure& mu);
double expectation(const MeasureBundle& mu);

struct DensitySample {
  double x;
  double density;
};

/// Samples at theta-uniform nodes on each interval, endpoints included.
std::vector<DensitySample> density_samples(const std::function<double(double)>& density, const SupportSet& sigma,
                                           int per_interval);
std::string density_csv(const std::vector<DensitySample>& samples);

}  // namespace tracebound
