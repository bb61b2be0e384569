#include <cmath>

#include "doctest.h"
#include "tracebound/closedform.hpp"
#include "tracebound/descent.hpp"
#include "tracebound/errors.hpp"

using namespace tracebound;

namespace {

std::vector<IntegerPolynomial> polys(std::initializer_list<const char*> names) {
  std::vector<IntegerPolynomial> out;
  for (const char* n : names) out.push_back(IntegerPolynomial::parse(n));
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("residuals vanish at known optima") {
  auto schur = solve_schur();
  CHECK(max_abs(residuals(SupportSet({schur.a, schur.b}), {})) < 1e-7);
  auto siegel = solve_siegel();
  CHECK(max_abs(residuals(SupportSet({siegel.a, siegel.b}), polys({"x"}))) < 1e-6);
  CHECK(max_abs(residuals(SupportSet({0.0362736, 0.828301, 1.190973, 5.707091}), polys({"x", "x-1"}))) < 1e-5);
}

TEST_CASE("residual layout and objective") {
  SupportSet s({0.04, 0.8, 1.2, 5.6});
  auto A = polys({"x", "x-1"});
  auto mu = candidate_measure(s, A);
  auto r = residuals(mu);
  REQUIRE(r.size() == 1 + 4 + 2);
  CHECK(r[0] == mu.energy());
  CHECK(r[5] == mu.log_moments()[0]);
  double sum = 0;
  for (double v : r) sum += v * v;
  CHECK(objective(r) == sum);
  // Raw boundary densities rescale the same entries.
  auto raw = residuals(mu, false);
  CHECK(raw[1] == doctest::Approx(r[1] * mu.eq_weight(0, 0.04)));
  // The pinned endpoint of the empty set carries no boundary residual.
  CHECK(residuals(SupportSet({0, 6.6}), {}).size() == 2);
}

TEST_CASE("gradient is small at an optimum") {
  auto siegel = solve_siegel();
  DescentConfig cfg;
  auto g = gradient(SupportSet({siegel.a, siegel.b}), polys({"x"}), cfg);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    CHECK(g.usable[i]);
    CHECK(std::abs(g.values[i]) < 1e-6);
  }
}

TEST_CASE("gradient is Richardson-consistent with one-sided differences") {
  SupportSet s({0.04, 0.8, 1.2, 5.6});
  auto A = polys({"x", "x-1"});
  DescentConfig cfg;
  auto g = gradient(s, A, cfg);
  const double f0 = objective(residuals(s, A));
  for (std::size_t i = 0; i < 4; ++i) {
    auto one_sided = [&](double h) {
      auto a = s.endpoints();
      a[i] += h;
      return (objective(residuals(SupportSet(a), A)) - f0) / h;
    };
    const double h = 1e-4;
    double d1 = one_sided(h), d2 = one_sided(h / 2);
    double richardson = 2 * d2 - d1;
    // First-order error halves with the step; the extrapolation matches the central difference.
    CHECK(std::abs(d1 - g.values[i]) == doctest::Approx(2 * std::abs(d2 - g.values[i])).epsilon(0.05));
    CHECK(std::abs(richardson - g.values[i]) < 1e-3 * std::abs(d1 - g.values[i]) + 1e-9);
  }
}

TEST_CASE("objective decreases along the negative gradient") {
  SupportSet s({0.04, 0.8, 1.2, 5.6});
  auto A = polys({"x", "x-1"});
  DescentConfig cfg;
  auto g = gradient(s, A, cfg);
  double f0 = objective(residuals(s, A));
  auto a = s.endpoints();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= 1e-3 * g.values[i];
  CHECK(objective(residuals(SupportSet(a), A)) < f0);
}

TEST_CASE("gradient does not depend on the thread count") {
  SupportSet s({0.04, 0.8, 1.2, 5.6});
  auto A = polys({"x", "x-1"});
  DescentConfig one, four;
  one.threads = 1;
  four.threads = 4;
  auto g1 = gradient(s, A, one), g4 = gradient(s, A, four);
  CHECK(g1.values == g4.values);
}

TEST_CASE("descent approaches the single root at zero") {
  // Full convergence is exercised by the acceptance run; here a bounded number of steps.
  auto siegel = solve_siegel();
  DescentConfig cfg;
  cfg.max_iters = 300;
  cfg.objective_tol = 0;
  auto res = run_descent(SupportSet({siegel.a + 5e-4, siegel.b - 5e-3}), polys({"x"}), cfg);
  REQUIRE(res.objective_history.size() > 1);
  for (std::size_t i = 1; i < res.objective_history.size(); ++i)
    CHECK(res.objective_history[i] <= res.objective_history[i - 1]);
  CHECK(res.objective_history.back() < 0.1 * res.objective_history.front());
  CHECK(std::abs(res.bundle.lambda() - siegel.E) < 1e-5);
  CHECK(res.bundle.lambda0() > 0);
  CHECK(res.bundle.lambda_q(0) >= 0);
}

TEST_CASE("descent on the pinned empty-set interval") {
  DescentConfig cfg;
  cfg.objective_tol = 1e-18;
  auto res = run_descent(SupportSet({0.0, 6.2}), {}, cfg);
  CHECK(res.state.endpoints[0] == 0.0);
  CHECK(res.bundle.lambda() == doctest::Approx(std::exp(0.5)).epsilon(1e-6));
  CHECK(res.state.endpoints[1] == doctest::Approx(4 * std::exp(0.5)).epsilon(1e-6));
}

TEST_CASE("progress callback sees every accepted step") {
  DescentConfig cfg;
  cfg.max_iters = 5;
  cfg.objective_tol = 0;
  long calls = 0;
  cfg.on_iteration = [&](const DescentState& st, const MeasureBundle&) {
    ++calls;
    CHECK(st.iteration == calls);
  };
  auto res = run_descent(SupportSet({0.05, 0.8, 1.2, 5.5}), polys({"x", "x-1"}), cfg);
  CHECK(calls == 5);
  CHECK(res.state.iteration == 5);
}

TEST_CASE("descent config validation") {
  DescentConfig cfg;
  cfg.fd_step = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.shrink = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("default initial supports") {
  CHECK(default_init({}).endpoints() == std::vector<double>{0.0, 6.6});
  auto one = default_init(polys({"x"})).endpoints();
  CHECK(one == std::vector<double>{0.05, 6.6});
  auto two = default_init(polys({"x", "x-1"}));
  CHECK(two.interval_count() == 2);
  CHECK(two.gap(0).lo < 1.0);
  CHECK(two.gap(0).hi > 1.0);
  CHECK_NOTHROW(candidate_measure(default_init(polys({"x", "x-1", "x^2-3x+1"})), polys({"x", "x-1", "x^2-3x+1"})));
  CHECK_THROWS_AS(default_init(polys({"x-20"})), RootOutOfRange);
}
