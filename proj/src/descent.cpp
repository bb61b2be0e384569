#include "tracebound/descent.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tracebound/errors.hpp"

namespace tracebound {

void DescentConfig::validate() const {
  if (!(fd_step > 0) || max_iters < 0 || !(objective_tol >= 0) || !(shrink > 0 && shrink < 1) ||
      !(sufficient_decrease > 0 && sufficient_decrease < 1) || max_backtracks <= 0 || !(min_separation > 0))
    throw InvalidArgument("invalid descent configuration");
  quadrature.validate();
}

std::vector<double> residuals(const MeasureBundle& mu, bool normalized_boundary) {
  std::vector<double> r{mu.energy()};
  const auto& a = mu.support().endpoints();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mu.pinned() && i == 0) continue;
    double ratio = mu.boundary_ratios()[i];
    r.push_back(normalized_boundary ? ratio : ratio * mu.eq_weight(i / 2, a[i]));
  }
  for (double lm : mu.log_moments()) r.push_back(lm);
  return r;
}

std::vector<double> residuals(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys,
                              const QuadratureConfig& cfg, bool normalized_boundary) {
  return residuals(candidate_measure(sigma, polys, cfg), normalized_boundary);
}

double objective(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

namespace {

unsigned thread_count(unsigned requested) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return requested == 0 ? hw : requested;
}

std::optional<double> objective_at(const std::vector<double>& a, const std::vector<IntegerPolynomial>& polys,
                                   const DescentConfig& cfg) {
  try {
    return objective(residuals(SupportSet(a), polys, cfg.quadrature, cfg.normalized_boundary));
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool well_separated(const std::vector<double>& a, double sep) {
  if (a.front() < 0.0 || a.back() > 18.0) return false;
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(a[i] - a[i - 1] >= sep)) return false;
  return true;
}

}  // namespace

Gradient gradient(const SupportSet& sigma, const std::vector<IntegerPolynomial>& polys, const DescentConfig& cfg) {
  const std::vector<double>& a = sigma.endpoints();
  const std::size_t n = a.size();
  Gradient g{std::vector<double>(n, 0.0), std::vector<bool>(n, false)};
  const bool pinned = polys.empty();
  constexpr double kGap = 1e-9;

  auto coordinate = [&](std::size_t i) {
    if (pinned && i == 0) return;
    double h = cfg.fd_step * std::max(1.0, std::abs(a[i]));
    double lo = (i == 0 ? 0.0 : a[i - 1] + kGap), hi = (i + 1 == n ? 18.0 : a[i + 1] - kGap);
    double up = std::min(a[i] + h, hi), dn = std::max(a[i] - h, lo);
    if (!(up > dn)) return;
    std::vector<double> p = a, m = a;
    p[i] = up;
    m[i] = dn;
    auto fp = objective_at(p, polys, cfg), fm = objective_at(m, polys, cfg);
    if (!fp || !fm) return;
    g.values[i] = (*fp - *fm) / (up - dn);
    g.usable[i] = true;
  };

  // Each worker owns a fixed stride of coordinates and writes only its slots.
  unsigned workers = std::min<unsigned>(thread_count(cfg.threads), static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) coordinate(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) coordinate(i);
      });
    for (auto& t : pool) t.join();
  }
  return g;
}

DescentResult run_descent(const SupportSet& init, const std::vector<IntegerPolynomial>& polys,
                          const DescentConfig& cfg) {
  cfg.validate();
  DescentResult out{{}, candidate_measure(init, polys, cfg.quadrature), false, {}};
  DescentState& st = out.state;
  st.endpoints = init.endpoints();
  st.residuals = residuals(out.bundle, cfg.normalized_boundary);
  st.objective = objective(st.residuals);
  out.objective_history.push_back(st.objective);

  double step = 0.0;
  while (st.iteration < cfg.max_iters) {
    if (st.objective < cfg.objective_tol) break;
    Gradient g = gradient(SupportSet(st.endpoints), polys, cfg);
    double gmax = 0.0, gnorm2 = 0.0;
    for (double v : g.values) {
      gmax = std::max(gmax, std::abs(v));
      gnorm2 += v * v;
    }
    if (gmax == 0.0) throw Stalled("gradient vanished with objective " + std::to_string(st.objective));

    // First trial moves the steepest coordinate by 1e-4; later trials grow
    // the previously accepted step.
    step = (step == 0.0) ? 1e-4 / gmax : 2.0 * step;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks && !accepted; ++bt, step *= cfg.shrink) {
      std::vector<double> trial = st.endpoints;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= step * g.values[i];
      if (!well_separated(trial, cfg.min_separation)) continue;
      try {
        MeasureBundle b = candidate_measure(SupportSet(trial), polys, cfg.quadrature);
        std::vector<double> r = residuals(b, cfg.normalized_boundary);
        double f = objective(r);
        if (f <= st.objective - cfg.sufficient_decrease * step * gnorm2) {
          st.endpoints = std::move(trial);
          st.residuals = std::move(r);
          st.objective = f;
          out.bundle = std::move(b);
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // Infeasible trial point; shrink and retry.
      }
    }
    if (!accepted)
      throw Stalled("line search failed at iteration " + std::to_string(st.iteration) + " with objective " +
                    std::to_string(st.objective));
    ++st.iteration;
    out.objective_history.push_back(st.objective);
    if (cfg.on_iteration) cfg.on_iteration(st, out.bundle);
  }
  out.converged = st.objective < cfg.objective_tol;
  return out;
}

SupportSet default_init(const std::vector<IntegerPolynomial>& polys) {
  const double right_default = std::ceil(40.0 * std::exp(0.5)) / 10.0;  // 4 sqrt(e) rounded up: 6.6
  if (polys.empty()) return SupportSet({0.0, right_default});
  std::vector<double> roots;
  for (const auto& q : polys)
    for (double r : polynomial_roots(q)) {
      if (r < 0.0 || r > 18.0) throw RootOutOfRange("root of " + q.to_string() + " outside [0, 18]");
      roots.push_back(r);
    }
  std::sort(roots.begin(), roots.end());
  std::vector<double> a;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    double left_gap = (i + 1 < roots.size()) ? roots[i + 1] - roots[i] : 1.0;
    a.push_back(roots[i] + 0.05 * left_gap);
    if (i + 1 < roots.size()) a.push_back(roots[i + 1] - 0.05 * (roots[i + 1] - roots[i]));
  }
  a.push_back(std::min(18.0, std::max(right_default, roots.back() + 1.0)));
  return SupportSet(a);
}

}  // namespace tracebound
