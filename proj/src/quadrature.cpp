#include "tracebound/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tracebound/errors.hpp"

namespace tracebound {

SupportSet::SupportSet(std::vector<double> endpoints, double lo_bound, double hi_bound) : a_(std::move(endpoints)) {
  validate_order(a_);
  if (a_.front() < lo_bound || a_.back() > hi_bound)
    throw InvalidArgument("support must lie in [" + std::to_string(lo_bound) + ", " + std::to_string(hi_bound) + "]");
}

SupportSet SupportSet::unchecked(std::vector<double> endpoints) {
  validate_order(endpoints);
  SupportSet s;
  s.a_ = std::move(endpoints);
  return s;
}

void SupportSet::validate_order(const std::vector<double>& a) {
  if (a.size() < 2 || a.size() % 2 != 0) throw InvalidArgument("support needs an even, nonzero number of endpoints");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) throw InvalidArgument("support endpoint is not finite");
    if (i > 0 && !(a[i] > a[i - 1])) throw InvalidArgument("support endpoints must be strictly increasing");
  }
}

int SupportSet::locate(double x) const {
  for (std::size_t k = 0; k < interval_count(); ++k)
    if (x >= a_[2 * k] && x <= a_[2 * k + 1]) return static_cast<int>(k);
  return -1;
}

double SupportSet::sqrt_abs_h_rest(double x, std::size_t j) const {
  double prod = 1.0;
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (i != j && i != j + 1) prod *= std::abs(x - a_[i]);
  return std::sqrt(prod);
}

double SupportSet::abs_h(double x) const {
  double prod = 1.0;
  for (double a : a_) prod *= std::abs(x - a);
  return prod;
}

void QuadratureConfig::validate() const {
  if (nodes_per_interval < 16 || (nodes_per_interval & (nodes_per_interval - 1)) != 0)
    throw InvalidArgument("nodes_per_interval must be a power of two >= 16");
  if (!(refinement_tol > 0)) throw InvalidArgument("refinement_tol must be positive");
}

namespace {

constexpr int kMaxNodes = 1 << 20;

double midpoint_theta(const std::function<double(double)>& g, Interval iv, int n) {
  const double m = iv.mid(), c = iv.half_width();
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double theta = (j + 0.5) * std::numbers::pi / n;
    sum += g(m + c * std::cos(theta));
  }
  return sum * std::numbers::pi / n;
}

}  // namespace

SingularIntegral integrate_singular_detailed(const std::function<double(double)>& g, Interval iv,
                                             const QuadratureConfig& cfg) {
  cfg.validate();
  SingularIntegral out;
  int n = cfg.nodes_per_interval;
  double prev = midpoint_theta(g, iv, n);
  while (true) {
    if (2 * n > kMaxNodes) throw NoConvergence("integrate_singular exceeded 2^20 nodes");
    double next = midpoint_theta(g, iv, 2 * n);
    double delta = std::abs(next - prev);
    out.deltas.push_back(delta);
    n *= 2;
    prev = next;
    if (delta < cfg.refinement_tol * std::max(1.0, std::abs(next))) break;
  }
  out.value = prev;
  out.nodes = n;
  return out;
}

double integrate_singular(const std::function<double(double)>& g, Interval iv, const QuadratureConfig& cfg) {
  return integrate_singular_detailed(g, iv, cfg).value;
}

double integrate_singular_union(const std::function<double(double)>& g, const SupportSet& sigma,
                                const QuadratureConfig& cfg) {
  double total = 0.0;
  for (std::size_t k = 0; k < sigma.interval_count(); ++k) {
    auto local = [&](double x) { return g(x) / sigma.sqrt_abs_h_rest(x, 2 * k); };
    total += integrate_singular(local, sigma.interval(k), cfg);
  }
  return total;
}

double integrate_smooth(const std::function<double(double)>& g, Interval iv, double tol) {
  if (!(tol > 0)) throw InvalidArgument("integrate_smooth needs a positive tolerance");
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  // Boost's tolerance is relative to the L1 norm; convert from the absolute one.
  double l1 = 0.0, err = 0.0;
  GK::integrate(g, iv.lo, iv.hi, 0, 0.0, &err, &l1);
  double rel = tol / std::max(l1, 1e-300);
  double value = GK::integrate(g, iv.lo, iv.hi, 25, rel, &err);
  if (std::isfinite(value) && err <= tol) return value;
  // Integrable end singularities defeat bisection; the double-exponential rule clusters nodes there.
  boost::math::quadrature::tanh_sinh<double> ts;
  value = ts.integrate(g, iv.lo, iv.hi, rel, &err, &l1);
  if (!std::isfinite(value) || err > tol) throw NoConvergence("integrate_smooth did not reach tolerance");
  return value;
}

}  // namespace tracebound
