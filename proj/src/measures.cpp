#include "tracebound/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "tracebound/errors.hpp"

namespace tracebound {

namespace {

constexpr double kPi = std::numbers::pi;

double fit_tolerance(const QuadratureConfig& cfg) { return std::max(cfg.refinement_tol * 1e-2, 1e-15); }

// Integrals over gap i of F_m(x) / sqrt|H(x)|, m < count. The two gap
// endpoints go into the theta substitution; the other factors of H stay in
// product form. Nodes double until every integral settles.
std::vector<double> gap_integrals(const SupportSet& s, std::size_t i, std::size_t count,
                                  const std::function<void(double, double*)>& f, double tol) {
  const Interval g = s.gap(i);
  const std::size_t j = 2 * i + 1;
  std::vector<double> prev, cur(count), vals(count);
  for (int n = 32; n <= (1 << 18); n *= 2) {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (int q = 0; q < n; ++q) {
      double x = g.mid() - g.half_width() * std::cos((q + 0.5) * kPi / n);
      double r = 1.0 / s.sqrt_abs_h_rest(x, j);
      f(x, vals.data());
      for (std::size_t m = 0; m < count; ++m) cur[m] += vals[m] * r;
    }
    for (double& v : cur) v *= kPi / n;
    if (!prev.empty()) {
      double scale = 0.0, diff = 0.0;
      for (std::size_t m = 0; m < count; ++m) {
        scale = std::max(scale, std::abs(cur[m]));
        diff = std::max(diff, std::abs(cur[m] - prev[m]));
      }
      if (diff <= tol * std::max(scale, std::numeric_limits<double>::min())) return cur;
    }
    prev = cur;
  }
  throw NoConvergence("gap integral did not converge");
}

// P(y) = prod (y - r_i) and sum_j gamma_j prod_{i != j} (y - r_i).
struct ProductSums {
  double full;
  double partial;
};

ProductSums product_sums(double y, const std::vector<double>& r, const std::vector<double>& gamma) {
  const std::size_t l = r.size();
  double full = 1.0;
  for (double v : r) full *= (y - v);
  if (gamma.empty()) return {full, 0.0};
  // Prefix/suffix products avoid dividing by a small (y - r_j).
  double partial = 0.0, prefix = 1.0;
  std::vector<double> suffix(l + 1, 1.0);
  for (std::size_t i = l; i-- > 0;) suffix[i] = suffix[i + 1] * (y - r[i]);
  for (std::size_t jj = 0; jj < l; ++jj) {
    partial += gamma[jj] * prefix * suffix[jj + 1];
    prefix *= (y - r[jj]);
  }
  return {full, partial};
}

Eigen::VectorXd solve_square(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw SingularSystem(std::string(what) + ": singular linear system");
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SingularSystem(std::string(what) + ": non-finite solution");
  return x;
}

double interval_sign(std::size_t l, std::size_t k) { return ((l - k) % 2 == 0) ? 1.0 : -1.0; }

double eq_weight_at(const SupportSet& s, const std::vector<double>& roots, std::size_t k, double y) {
  double p = 1.0;
  for (double r : roots) p *= (y - r);
  return p / (interval_sign(s.gap_count(), k) * s.sqrt_abs_h_rest(y, 2 * k));
}

double lin_weight_at(const SupportSet& s, const std::vector<double>& roots, const std::vector<double>& gammas,
                     std::size_t k, double y) {
  ProductSums ps = product_sums(y, roots, gammas);
  return (-y * ps.full + ps.partial) / (interval_sign(s.gap_count(), k) * s.sqrt_abs_h_rest(y, 2 * k));
}

SqrtMeasure equilibrium_on(const SupportSet& s, const std::vector<double>& roots, double tol) {
  return SqrtMeasure(s, [s, roots](std::size_t k, double y) { return eq_weight_at(s, roots, k, y); }, tol);
}

double reference_point(const SupportSet& s) { return s.interval(0).mid(); }

}  // namespace

// ---------------------------------------------------------------- SqrtMeasure

SqrtMeasure::SqrtMeasure(SupportSet support, Weight weight, double fit_tol)
    : support_(std::move(support)), weight_(std::move(weight)), fit_tol_(fit_tol) {}

SqrtMeasure SqrtMeasure::from_pieces(SupportSet support, std::vector<ChebPiece> pieces) {
  if (pieces.size() != support.interval_count()) throw InvalidArgument("one Chebyshev piece per interval required");
  auto shared = std::make_shared<std::vector<ChebPiece>>(pieces);
  SqrtMeasure mu(std::move(support), [shared](std::size_t k, double y) { return (*shared)[k].weight(y); });
  mu.pieces_ = std::move(pieces);
  return mu;
}

SqrtMeasure SqrtMeasure::linear_combination(const std::vector<std::pair<double, const SqrtMeasure*>>& terms) {
  if (terms.empty()) throw InvalidArgument("empty linear combination");
  std::vector<std::pair<double, SqrtMeasure>> copies;
  for (const auto& [c, m] : terms) copies.emplace_back(c, *m);
  auto shared = std::make_shared<std::vector<std::pair<double, SqrtMeasure>>>(std::move(copies));
  SqrtMeasure out(terms.front().second->support(), [shared](std::size_t k, double y) {
    double acc = 0.0;
    for (const auto& [c, m] : *shared) acc += c * m.weight(k, y);
    return acc;
  });
  out.fit_tol_ = terms.front().second->fit_tol_;
  bool fitted = std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second->pieces_.has_value(); });
  if (fitted) {
    std::vector<ChebPiece> pieces;
    for (std::size_t k = 0; k < out.support().interval_count(); ++k) {
      std::vector<std::pair<double, const ChebPiece*>> parts;
      for (const auto& [c, m] : terms) parts.emplace_back(c, &(*m->pieces_)[k]);
      pieces.push_back(combine(parts));
    }
    out.pieces_ = std::move(pieces);
  }
  return out;
}

double SqrtMeasure::density(double x) const {
  int k = support_.locate(x);
  if (k < 0) return 0.0;
  Interval iv = support_.interval(k);
  return weight_(k, x) / (kPi * std::sqrt((iv.hi - x) * (x - iv.lo)));
}

const std::vector<ChebPiece>& SqrtMeasure::pieces() const {
  if (!pieces_) {
    std::vector<ChebPiece> out;
    for (std::size_t k = 0; k < support_.interval_count(); ++k)
      out.push_back(chebyshev_fit([&](double y) { return weight_(k, y); }, support_.interval(k), 32, fit_tol_));
    pieces_ = std::move(out);
  }
  return *pieces_;
}

double SqrtMeasure::mass() const {
  double m = 0.0;
  for (const auto& p : pieces()) m += p.mass();
  return m;
}

double SqrtMeasure::mean() const {
  double m = 0.0;
  for (const auto& p : pieces()) m += p.mean();
  return m;
}

double SqrtMeasure::potential(double x) const {
  double u = 0.0;
  for (const auto& p : pieces()) u += p.log_potential(x);
  return u;
}

double SqrtMeasure::potential_d1(double x) const {
  if (support_.contains(x)) throw InvalidArgument("potential derivative requested on the support");
  double u = 0.0;
  for (const auto& p : pieces()) u += p.log_potential_d1(x);
  return u;
}

double SqrtMeasure::potential_d2(double x) const {
  if (support_.contains(x)) throw InvalidArgument("potential derivative requested on the support");
  double u = 0.0;
  for (const auto& p : pieces()) u += p.log_potential_d2(x);
  return u;
}

double SqrtMeasure::energy() const {
  const auto& ps = pieces();
  double total = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const ChebPiece& pk = ps[k];
    // Self interaction in closed form from Chebyshev orthogonality.
    double self = pk.beta.empty() ? 0.0 : pk.beta[0] * pk.beta[0] * (std::log(pk.iv.half_width()) - std::numbers::ln2);
    for (std::size_t n = 1; n < pk.beta.size(); ++n) self -= pk.beta[n] * pk.beta[n] / (2.0 * n);
    total += self;
    if (ps.size() == 1) continue;
    // Other pieces have analytic potentials on this interval; Gauss-Chebyshev.
    auto cross = [&](int n) {
      double acc = 0.0;
      for (double y : chebyshev_nodes(pk.iv, n)) {
        double u = 0.0;
        for (std::size_t j = 0; j < ps.size(); ++j)
          if (j != k) u += ps[j].log_potential(y);
        acc += u * pk.weight(y);
      }
      return acc / n;
    };
    int n = std::max<int>(64, 2 * static_cast<int>(pk.beta.size()));
    double prev = cross(n);
    for (int it = 0; it < 12; ++it) {
      n *= 2;
      double cur = cross(n);
      bool done = std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur));
      prev = cur;
      if (done) break;
    }
    total += prev;
  }
  return total;
}

// ---------------------------------------------------------------- equilibrium

std::vector<double> equilibrium_roots(const SupportSet& s, const QuadratureConfig& cfg) {
  const std::size_t l = s.gap_count();
  if (l == 0) return {};
  // Basis: B(x) = prod (x - g_i) over gap midpoints and B_j = B / (x - g_j).
  // The monic numerator B + sum gamma_j B_j has small, well separated
  // corrections, which keeps the system well conditioned for many intervals.
  std::vector<double> mids(l);
  for (std::size_t i = 0; i < l; ++i) mids[i] = s.gap(i).mid();

  Eigen::MatrixXd m(l, l);
  Eigen::VectorXd rhs(l);
  const double tol = fit_tolerance(cfg);
  std::vector<double> unit(l, 1.0);
  for (std::size_t i = 0; i < l; ++i) {
    auto basis = [&](double x, double* out) {
      double pre = 1.0;
      std::vector<double> suffix(l + 1, 1.0);
      for (std::size_t q = l; q-- > 0;) suffix[q] = suffix[q + 1] * (x - mids[q]);
      for (std::size_t q = 0; q < l; ++q) {
        out[q] = pre * suffix[q + 1];
        pre *= (x - mids[q]);
      }
      out[l] = pre;
    };
    std::vector<double> ints = gap_integrals(s, i, l + 1, basis, tol);
    for (std::size_t q = 0; q < l; ++q) m(i, q) = ints[q];
    rhs(i) = -ints[l];
  }
  Eigen::VectorXd gamma = solve_square(m, rhs, "equilibrium measure");
  std::vector<double> gam(gamma.data(), gamma.data() + l);

  auto p = [&](double x) {
    ProductSums ps = product_sums(x, mids, gam);
    return ps.full + ps.partial;
  };
  std::vector<double> roots(l);
  boost::math::tools::eps_tolerance<double> eps(std::numeric_limits<double>::digits - 3);
  for (std::size_t i = 0; i < l; ++i) {
    Interval g = s.gap(i);
    double fl = p(g.lo), fh = p(g.hi);
    if (fl == 0.0 || fh == 0.0 || (fl < 0) == (fh < 0))
      throw SingularSystem("equilibrium numerator has no sign change in gap " + std::to_string(i));
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(p, g.lo, g.hi, fl, fh, eps, iters);
    roots[i] = 0.5 * (lo + hi);
  }
  return roots;
}

EquilibriumMeasure equilibrium_measure(const SupportSet& sigma, const QuadratureConfig& cfg) {
  EquilibriumMeasure out;
  out.roots = equilibrium_roots(sigma, cfg);
  out.measure = equilibrium_on(sigma, out.roots, fit_tolerance(cfg));
  out.constant = out.measure.potential(reference_point(sigma));
  return out;
}

double capacity_constant(const SupportSet& sigma, const QuadratureConfig& cfg) {
  return equilibrium_measure(sigma, cfg).constant;
}

// ---------------------------------------------------------------- log potential

std::vector<double> log_potential_image_roots(const SupportSet& sigma, double alpha, const QuadratureConfig& cfg) {
  if (sigma.contains(alpha)) throw AlphaOnSupport("pole lies on the support");
  std::vector<double> image;
  for (double a : sigma.endpoints()) image.push_back(1.0 / (a - alpha));
  std::sort(image.begin(), image.end());
  return equilibrium_roots(SupportSet::unchecked(image), cfg);
}

double log_potential_weight(const SupportSet& sigma, double alpha, double scale, const std::vector<double>& image_roots,
                            std::size_t k, double y) {
  const double d = y - alpha;
  double p = 1.0;
  for (double s : image_roots) p *= (1.0 - s * d);
  return scale * std::abs(p) / (std::abs(d) * sigma.sqrt_abs_h_rest(y, 2 * k));
}

LogPotentialMeasure log_potential_measure(const SupportSet& sigma, double alpha, const QuadratureConfig& cfg) {
  LogPotentialMeasure out;
  out.alpha = alpha;
  out.image_roots = log_potential_image_roots(sigma, alpha, cfg);
  out.scale = std::sqrt(sigma.abs_h(alpha));
  out.measure = SqrtMeasure(
      sigma,
      [sigma, alpha, scale = out.scale, roots = out.image_roots](std::size_t k, double y) {
        return log_potential_weight(sigma, alpha, scale, roots, k, y);
      },
      fit_tolerance(cfg));

  // Pull back the image equilibrium potential: for x on the support,
  // log|x - y| = log|x - alpha| + log|s - psi(x)| - log|s| with s = psi(y).
  std::vector<double> image;
  for (double a : sigma.endpoints()) image.push_back(1.0 / (a - alpha));
  std::sort(image.begin(), image.end());
  SupportSet image_set = SupportSet::unchecked(image);
  SqrtMeasure image_eq = equilibrium_on(image_set, out.image_roots, fit_tolerance(cfg));
  out.constant = image_eq.potential(reference_point(image_set)) - image_eq.potential(0.0);
  return out;
}

std::vector<double> polynomial_roots(const IntegerPolynomial& q) {
  if (q.degree() < 1) throw InvalidArgument("polynomial " + q.to_string() + " has no roots");
  RealPolynomial p = q.to_real();
  double bound = 1.0;
  for (int i = 0; i < q.degree(); ++i) bound = std::max(bound, 1.0 + std::abs(p[i] / p.leading()));
  std::vector<double> roots = real_roots(p, -bound, bound);
  if (static_cast<int>(roots.size()) != q.degree())
    throw InvalidArgument("polynomial " + q.to_string() + " must have only real roots");
  return roots;
}

PolynomialMeasure measure_for_polynomial(const SupportSet& sigma, const IntegerPolynomial& q,
                                         const QuadratureConfig& cfg) {
  PolynomialMeasure out;
  out.poly = q;
  std::vector<double> roots = polynomial_roots(q);
  for (double r : roots)
    if (sigma.contains(r)) throw RootOnSupport("root of " + q.to_string() + " lies on the support");
  const double d = q.degree();
  std::vector<std::pair<double, const SqrtMeasure*>> terms;
  double csum = 0.0;
  for (double r : roots) out.parts.push_back(log_potential_measure(sigma, r, cfg));
  for (const auto& part : out.parts) {
    terms.emplace_back(1.0 / d, &part.measure);
    csum += part.constant;
  }
  out.measure = SqrtMeasure::linear_combination(terms);
  out.constant = csum / d - std::log(std::abs(static_cast<double>(q.leading()))) / d;
  return out;
}

// ---------------------------------------------------------------- linear potential

std::vector<double> linear_correction(const SupportSet& sigma, const std::vector<double>& eq_roots,
                                      const QuadratureConfig& cfg) {
  const std::size_t l = sigma.gap_count();
  if (l == 0) return {};
  // The base -y p_eq(y) has slope-one potential with per-interval offsets;
  // the zero-mass measures prod_{i != j}(y - sigma_i) shift the offsets.
  Eigen::MatrixXd m(l, l);
  Eigen::VectorXd rhs(l);
  const double tol = fit_tolerance(cfg);
  for (std::size_t i = 0; i < l; ++i) {
    auto basis = [&](double x, double* out) {
      double pre = 1.0;
      std::vector<double> suffix(l + 1, 1.0);
      for (std::size_t q = l; q-- > 0;) suffix[q] = suffix[q + 1] * (x - eq_roots[q]);
      for (std::size_t q = 0; q < l; ++q) {
        out[q] = pre * suffix[q + 1];
        pre *= (x - eq_roots[q]);
      }
      out[l] = -x * pre;
    };
    std::vector<double> ints = gap_integrals(sigma, i, l + 1, basis, tol);
    for (std::size_t q = 0; q < l; ++q) m(i, q) = ints[q];
    rhs(i) = -ints[l];
  }
  Eigen::VectorXd gamma = solve_square(m, rhs, "linear potential measure");
  return {gamma.data(), gamma.data() + l};
}

LinearPotentialMeasure linear_potential_measure(const SupportSet& sigma, const QuadratureConfig& cfg) {
  LinearPotentialMeasure out;
  out.eq_roots = equilibrium_roots(sigma, cfg);
  out.gammas = linear_correction(sigma, out.eq_roots, cfg);
  out.measure = SqrtMeasure(
      sigma,
      [sigma, roots = out.eq_roots, gammas = out.gammas](std::size_t k, double y) {
        return lin_weight_at(sigma, roots, gammas, k, y);
      },
      fit_tolerance(cfg));
  out.mass = out.measure.mass();
  double ref = reference_point(sigma);
  out.offset = out.measure.potential(ref) - ref;
  return out;
}

// ---------------------------------------------------------------- bundle

double MeasureBundle::interval_sign(std::size_t k) const { return tracebound::interval_sign(sigma_.gap_count(), k); }

double MeasureBundle::eq_weight(std::size_t k, double y) const { return eq_weight_at(sigma_, eq_roots_, k, y); }

double MeasureBundle::lin_weight(std::size_t k, double y) const {
  return lin_weight_at(sigma_, eq_roots_, lin_gammas_, k, y);
}

double MeasureBundle::root_weight(std::size_t r, std::size_t k, double y) const {
  const Root& root = roots_[r];
  return log_potential_weight(sigma_, root.alpha, root.scale, root.image_roots, k, y);
}

double MeasureBundle::combined_weight(std::size_t k, double y) const {
  const double rest = interval_sign(k) * sigma_.sqrt_abs_h_rest(y, 2 * k);
  ProductSums ps = product_sums(y, eq_roots_, lin_gammas_);
  double num = x_eq_ * ps.full + x_lin_ * (-y * ps.full + ps.partial);
  double acc = num / rest;
  for (const Root& root : roots_) {
    const double d = y - root.alpha;
    double p = 1.0;
    for (double s : root.image_roots) p *= (1.0 - s * d);
    double coeff = x_q_[root.poly] / polys_[root.poly].degree();
    acc += coeff * root.scale * std::abs(p) / (std::abs(d) * std::abs(rest));
  }
  return acc;
}

double MeasureBundle::target_weight(std::size_t k, double y) const {
  Interval iv = sigma_.interval(k);
  if (pinned()) return kPi * c_ * (iv.hi - y);
  double q = 1.0;
  for (const Root& root : roots_) q *= std::abs(y - root.alpha);
  double rest = sigma_.sqrt_abs_h_rest(y, 2 * k);
  return kPi * c_ * rest * (y - iv.lo) * (iv.hi - y) / q;
}

double MeasureBundle::target_density(double x) const {
  int k = sigma_.locate(x);
  if (k < 0) return 0.0;
  if (pinned()) return x > 0.0 ? c_ * std::sqrt((sigma_.hi() - x) / x) : std::numeric_limits<double>::infinity();
  double q = 1.0;
  for (const Root& root : roots_) q *= std::abs(x - root.alpha);
  return c_ * std::sqrt(sigma_.abs_h(x)) / q;
}

double MeasureBundle::support_potential(double x) const {
  double u = total_constant_ + x_lin_ * x;
  for (std::size_t j = 0; j < polys_.size(); ++j)
    u += x_q_[j] * std::log(std::abs(polys_[j](x))) / polys_[j].degree();
  return u;
}

const SqrtMeasure& MeasureBundle::equilibrium() const {
  if (!eq_) eq_ = std::make_shared<SqrtMeasure>(equilibrium_on(sigma_, eq_roots_, 1e-14));
  return *eq_;
}

MeasureBundle candidate_measure(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys,
                                const QuadratureConfig& cfg, const CandidateOptions& opts) {
  MeasureBundle b;
  b.sigma_ = sigma;
  b.polys_ = polys;
  const std::size_t l = sigma.gap_count();
  const double tol = fit_tolerance(cfg);

  if (polys.empty()) {
    if (l != 0 || sigma.lo() != 0.0)
      throw GapRootMismatch("with no polynomials the support must be a single interval starting at 0");
  }
  for (std::size_t j = 0; j < polys.size(); ++j) {
    if (!polys[j].is_monic()) throw InvalidArgument("polynomial " + polys[j].to_string() + " must be monic");
    for (std::size_t i = 0; i < j; ++i)
      if (polys[i] == polys[j]) throw InvalidArgument("duplicate polynomial " + polys[j].to_string());
    for (double r : polynomial_roots(polys[j])) {
      if (sigma.contains(r)) throw RootOnSupport("root of " + polys[j].to_string() + " lies on the support");
      b.roots_.push_back({r, j, std::sqrt(sigma.abs_h(r)), {}});
    }
  }
  std::sort(b.roots_.begin(), b.roots_.end(), [](const auto& x, const auto& y) { return x.alpha < y.alpha; });
  for (std::size_t r = 1; r < b.roots_.size(); ++r)
    if (b.roots_[r].alpha == b.roots_[r - 1].alpha) throw InvalidArgument("polynomials share a root");

  if (!polys.empty()) {
    for (std::size_t i = 0; i < l; ++i) {
      Interval g = sigma.gap(i);
      auto n = std::count_if(b.roots_.begin(), b.roots_.end(),
                             [&](const auto& r) { return r.alpha > g.lo && r.alpha < g.hi; });
      if (n != 1)
        throw GapRootMismatch("gap " + std::to_string(i) + " holds " + std::to_string(n) + " roots instead of one");
    }
    if (b.roots_.size() != l + 1)
      throw GapRootMismatch("need exactly one root outside the gaps, found " + std::to_string(b.roots_.size() - l));
  }

  b.eq_roots_ = equilibrium_roots(sigma, cfg);
  b.lin_gammas_ = linear_correction(sigma, b.eq_roots_, cfg);
  for (auto& root : b.roots_) root.image_roots = log_potential_image_roots(sigma, root.alpha, cfg);

  // Normalisation of the target density.
  b.c_ = 1.0;
  SqrtMeasure target(sigma, [&b](std::size_t k, double y) { return b.target_weight(k, y); }, tol);
  b.c_ = 1.0 / target.mass();

  b.x_lin_ = kPi * b.c_;
  b.x_q_.assign(polys.size(), 0.0);
  for (std::size_t j = 0; j < polys.size(); ++j) {
    // |Res(H, Q)| = prod |Q(a_i)| for monic H and Q, kept in log form.
    const double d = polys[j].degree();
    double log_res_h = 0.0;
    for (double a : sigma.endpoints()) log_res_h += std::log(std::abs(polys[j](a)));
    RealPolynomial qj = polys[j].to_real();
    double log_den = d > 1 ? std::log(std::abs(discriminant(qj))) : 0.0;
    for (std::size_t i = 0; i < polys.size(); ++i)
      if (i != j) log_den += std::log(std::abs(resultant(qj, polys[i].to_real())));
    b.x_q_[j] = -d * b.x_lin_ * std::exp(log_res_h / (2 * d) - log_den / d);
  }

  SqrtMeasure lin(sigma, [&b](std::size_t k, double y) { return b.lin_weight(k, y); }, tol);
  b.lin_mass_ = lin.mass();
  b.x_eq_ = 1.0 - b.x_lin_ * b.lin_mass_;
  for (double x : b.x_q_) b.x_eq_ -= x;

  // Fit the combined measure once; every summary value comes from this fit.
  {
    MeasureBundle snapshot = b;
    auto shared = std::make_shared<MeasureBundle>(std::move(snapshot));
    b.mu_ = SqrtMeasure(sigma, [shared](std::size_t k, double y) { return shared->combined_weight(k, y); }, tol);
    b.mu_.pieces();
  }

  if (opts.require_positive) {
    double wmax = 0.0, wmin = 0.0;
    for (const auto& p : b.mu_.pieces())
      for (double y : chebyshev_nodes(p.iv, 64)) {
        double w = p.weight(y);
        wmax = std::max(wmax, w);
        wmin = std::min(wmin, w);
      }
    if (wmin < -1e-3 * wmax) throw NegativeDensity("combined density is negative inside the support");
  }

  b.mass_ = b.mu_.mass();
  b.mean_ = b.mu_.mean();
  const double ref = reference_point(sigma);
  b.total_constant_ = b.mu_.potential(ref) - b.x_lin_ * ref;
  for (std::size_t j = 0; j < polys.size(); ++j)
    b.total_constant_ -= b.x_q_[j] * std::log(std::abs(polys[j](ref))) / polys[j].degree();

  b.log_moments_.assign(polys.size(), 0.0);
  for (const auto& root : b.roots_) b.log_moments_[root.poly] += b.mu_.potential(root.alpha);

  b.energy_ = b.total_constant_ * b.mass_ + b.x_lin_ * b.mean_;
  for (std::size_t j = 0; j < polys.size(); ++j) b.energy_ += b.x_q_[j] * b.log_moments_[j] / polys[j].degree();

  const auto& a = sigma.endpoints();
  b.boundary_ratios_.assign(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    // The pinned endpoint carries the intended x^(-1/2) singularity.
    if (b.pinned() && i == 0) continue;
    b.boundary_ratios_[i] = b.combined_weight(i / 2, a[i]) / b.eq_weight(i / 2, a[i]);
  }
  return b;
}

// ---------------------------------------------------------------- evaluation helpers

double potential_at(const SqrtMeasure& mu, double x) { return mu.potential(x); }

double potential_at(const MeasureBundle& mu, double x) {
  return mu.support().contains(x) ? mu.support_potential(x) : mu.potential(x);
}

double energy(const SqrtMeasure& mu) { return mu.energy(); }
double energy(const MeasureBundle& mu) { return mu.energy(); }

double log_moment(const SqrtMeasure& mu, const IntegerPolynomial& q) {
  double acc = std::log(std::abs(static_cast<double>(q.leading())));
  for (double r : polynomial_roots(q)) {
    if (mu.support().contains(r)) throw RootOnSupport("root of " + q.to_string() + " lies on the support");
    acc += mu.potential(r);
  }
  return acc;
}

double log_moment(const MeasureBundle& mu, const IntegerPolynomial& q) {
  for (std::size_t j = 0; j < mu.polys().size(); ++j)
    if (mu.polys()[j] == q) return mu.log_moments()[j];
  return log_moment(mu.measure(), q);
}

double expectation(const SqrtMeasure& mu) { return mu.mean(); }
double expectation(const MeasureBundle& mu) { return mu.mean(); }

std::vector<DensitySample> density_samples(const std::function<double(double)>& density, const SupportSet& sigma,
                                           int per_interval) {
  if (per_interval < 2) throw InvalidArgument("need at least two samples per interval");
  std::vector<DensitySample> out;
  for (std::size_t k = 0; k < sigma.interval_count(); ++k) {
    Interval iv = sigma.interval(k);
    for (int j = 0; j < per_interval; ++j) {
      double theta = kPi * (per_interval - 1 - j) / (per_interval - 1);
      double x = std::clamp(iv.mid() + iv.half_width() * std::cos(theta), iv.lo, iv.hi);
      if (j == 0) x = iv.lo;
      if (j == per_interval - 1) x = iv.hi;
      out.push_back({x, density(x)});
    }
  }
  return out;
}

std::string density_csv(const std::vector<DensitySample>& samples) {
  std::ostringstream os;
  os << "x,density\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.x, s.density);
    os << buf;
  }
  return os.str();
}

}  // namespace tracebound
