// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tracebound/certificate.hpp"
#include "tracebound/closedform.hpp"
#include "tracebound/descent.hpp"
#include "tracebound/errors.hpp"

using namespace tracebound;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<IntegerPolynomial> polys(std::initializer_list<const char*> names) {
  std::vector<IntegerPolynomial> out;
  for (const char* n : names) out.push_back(IntegerPolynomial::parse(n));
  return out;
}

Certificate fixture(const char* name) {
  std::ifstream in(std::string(TRACEBOUND_FIXTURE_DIR) + "/" + name + ".json");
  std::stringstream ss;
  ss << in.rdbuf();
  return certificate_from_json(ss.str());
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
std::vector<Certificate> produced;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion_schur() {
  auto t0 = Clock::now();
  auto closed = solve_schur();
  double err_closed = std::abs(closed.lambda - std::sqrt(std::exp(1.0)));
  DescentConfig cfg;
  cfg.objective_tol = 1e-18;
  auto res = run_descent(SupportSet({0.0, 6.6}), {}, cfg);
  double numeric = res.bundle.lambda();
  double t = seconds_since(t0);
  produced.push_back(make_certificate(res.bundle));
  bool ok = err_closed < 1e-9 && std::abs(numeric - closed.lambda) < 1e-6 && t < 1.0;
  report(1, ok, fmt("closed=%.12f numeric=%.12f b=%.9f time=%.2fs", closed.lambda, numeric, res.state.endpoints[1], t));
}

void criterion_siegel() {
  auto t0 = Clock::now();
  auto s = solve_siegel();
  double nu_res = std::abs(siegel_nu_residual(s.nu));
  auto mu = candidate_measure(SupportSet({s.a, s.b}), polys({"x"}));
  const double g = std::sqrt(s.a * s.b);
  double worst = 0;
  for (int j = 1; j < 200; ++j) {
    double x = s.a + (s.b - s.a) * j / 200.0;
    double closed = 2 * std::sqrt((s.b - x) * (x - s.a)) / (std::numbers::pi * (s.a + s.b - 2 * g) * x);
    worst = std::max(worst, std::abs(mu.measure().density(x) - closed));
  }
  double t = seconds_since(t0);
  produced.push_back(make_certificate(mu));
  bool ok = std::abs(s.E - 1.7336105) <= 1e-6 && nu_res < 1e-10 && worst < 1e-6 && t < 1.0;
  report(2, ok, fmt("E=%.10f nu_residual=%.1e density_dev=%.1e time=%.2fs", s.E, nu_res, worst, t));
}

void criterion_two_polys() {
  auto t0 = Clock::now();
  DescentConfig cfg;
  auto res = run_descent(SupportSet({0.036, 0.83, 1.19, 5.71}), polys({"x", "x-1"}), cfg);
  double t = seconds_since(t0);
  const double paper[] = {0.0362736, 0.828301, 1.190973, 5.707091};
  double end_dev = 0;
  for (int i = 0; i < 4; ++i) end_dev = std::max(end_dev, std::abs(res.state.endpoints[i] - paper[i]));
  double lam = res.bundle.lambda(), inv_c = 1.0 / res.bundle.c();
  produced.push_back(make_certificate(res.bundle));
  bool ok = res.converged && std::abs(lam - 1.7773797) <= 1e-6 && end_dev < 1e-4 && std::abs(inv_c - 6.420592) <= 1e-4 &&
            t <= 600;
  report(3, ok,
         fmt("lambda=%.9f endpoint_dev=%.1e 1/c=%.7f iters=%ld time=%.0fs", lam, end_dev, inv_c, res.state.iteration, t));
}

void criterion_three_polys() {
  auto t0 = Clock::now();
  DescentConfig cfg;
  cfg.max_iters = 500;
  auto res = run_descent(SupportSet({0.0409275, 0.34114487, 0.4252603, 0.811681, 1.211488, 2.4844644, 2.7580631, 5.52512172}),
                         polys({"x", "x-1", "x^2-3x+1"}), cfg);
  double t = seconds_since(t0);
  auto cert = make_certificate(res.bundle);
  produced.push_back(cert);
  bool ok = std::abs(cert.lambda - 1.793023) <= 1e-5 && t <= 600 &&
            res.objective_history.back() < res.objective_history.front();
  report(4, ok,
         fmt("lambda=%.9f objective %.2e -> %.2e iters=%ld time=%.0fs", cert.lambda, res.objective_history.front(),
             res.objective_history.back(), res.state.iteration, t));
}

void criterion_four_five_polys() {
  auto t0 = Clock::now();
  auto r7 = certify(fixture("four_polys"));
  double t7 = seconds_since(t0);
  auto c7 = fixture("four_polys");
  t0 = Clock::now();
  auto r8 = certify(fixture("five_polys"));
  double t8 = seconds_since(t0);
  auto c8 = fixture("five_polys");
  bool ok = r7.pass && r8.pass && std::abs(c7.lambda - 1.798249) <= 1e-5 && std::abs(c8.lambda - 1.7998) <= 1e-3 &&
            t7 <= 60 && t8 <= 60;
  report(5, ok,
         fmt("four: lambda=%.9f certified=%.9f %s (%.1fs); five: lambda=%.9f certified=%.9f %s (%.1fs)", c7.lambda,
             r7.certified_bound, r7.pass ? "pass" : "fail", t7, c8.lambda, r8.certified_bound, r8.pass ? "pass" : "fail",
             t8));
}

void criterion_record() {
  auto t0 = Clock::now();
  auto cert = fixture("seven_polys");
  auto rep = certify(cert);
  double tv = seconds_since(t0);
  int gaps_ok = 0;
  for (bool b : rep.convexity_ok_per_gap) gaps_ok += b;

  t0 = Clock::now();
  DescentConfig cfg;
  cfg.max_iters = 100;
  cfg.objective_tol = 0;
  bool monotone = true;
  bool polished = false;
  double f0 = 0, f1 = 0;
  try {
    auto res = run_descent(SupportSet(cert.endpoints), cert.polys, cfg);
    for (std::size_t i = 1; i < res.objective_history.size(); ++i)
      monotone = monotone && res.objective_history[i] <= res.objective_history[i - 1];
    f0 = res.objective_history.front();
    f1 = res.objective_history.back();
    polished = res.state.iteration == 100 && f1 < f0;
    produced.push_back(make_certificate(res.bundle));
  } catch (const Error& e) {
    std::printf("  polish stopped: %s\n", e.what());
  }
  double tp = seconds_since(t0);
  bool ok = rep.pass && rep.equality_max_dev < 1e-6 && rep.delta_max <= 3.7e-5 && gaps_ok == 15 &&
            rep.certified_bound >= 1.80203 && rep.expectation <= 1.80213 && tv <= 300 && polished && monotone;
  report(6, ok,
         fmt("eq_dev=%.1e delta=%.1e gaps_ok=%d/15 certified=%.8f expectation=%.8f verify=%.1fs; "
             "polish 100 iters objective %.3e -> %.3e monotone=%s (%.0fs)",
             rep.equality_max_dev, rep.delta_max, gaps_ok, rep.certified_bound, rep.expectation, tv, f0, f1,
             monotone ? "yes" : "no", tp));
}

// Property suites.
void criterion_properties() {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  const SupportSet s({0.2, 0.9, 1.4, 2.0, 3.1, 5.5});
  auto samples = [&](int per) {
    std::vector<double> xs;
    for (std::size_t k = 0; k < s.interval_count(); ++k)
      for (int j = 1; j <= per; ++j) xs.push_back(s.interval(k).lo + (s.interval(k).hi - s.interval(k).lo) * j / (per + 1));
    return xs;
  };

  // Equilibrium potential constancy.
  auto eq = equilibrium_measure(s);
  double lo = 1e300, hi = -1e300;
  for (double x : samples(50)) {
    double u = eq.measure.potential(x);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  need(hi - lo < 1e-8, "equilibrium constancy");

  // Gap moments, integrated independently.
  RealPolynomial p = RealPolynomial::from_roots(eq.roots);
  for (std::size_t i = 0; i < s.gap_count(); ++i) {
    double v = oracle::arcsine_mean([&](double x) { return p(x) / s.sqrt_abs_h_rest(x, 2 * i + 1); }, s.gap(i));
    need(std::abs(v) < 1e-10, "gap moment");
  }

  // Push-forward offset constancy.
  for (double alpha : {0.0, 1.2, 2.5, 7.0}) {
    auto nu = log_potential_measure(s, alpha);
    lo = 1e300, hi = -1e300;
    for (double x : samples(30)) {
      double u = nu.measure.potential(x) - std::log(std::abs(x - alpha));
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    need(hi - lo < 1e-8, "push-forward constancy");
  }

  // Linear-potential slope.
  auto lin = linear_potential_measure(s);
  for (std::size_t k = 0; k < s.interval_count(); ++k) {
    Interval iv = s.interval(k);
    double x1 = iv.lo + 0.25 * (iv.hi - iv.lo), x2 = iv.lo + 0.75 * (iv.hi - iv.lo);
    double slope = (lin.measure.potential(x2) - lin.measure.potential(x1)) / (x2 - x1);
    need(std::abs(slope - 1) < 1e-8, "linear slope");
    need(std::abs(lin.measure.potential(x1) - x1 - lin.offset) < 1e-8, "linear offset");
  }

  // Closed forms against quadrature.
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int draws = 0;
  while (draws < 100) {
    double a = 0.1 + 2 * u(rng), b = a + 0.2 + 4 * u(rng);
    IntervalFamilyParams fp(a, b, 2 * u(rng) - 0.5, (2 * u(rng) - 1) / (b - a));
    if (fp.min_density_numerator() <= 0.05) continue;
    ++draws;
    const double g = std::sqrt(a * b), m = fp.m();
    auto w = [&](std::size_t, double y) { return fp.alpha + fp.beta() * g / y + fp.gamma * (m - y); };
    SupportSet one({a, b});
    double e_q = oracle::integrate_weight(w, one, [](double x) { return x; });
    double l_q = oracle::potential(w, one, 0.0);
    double u_q = oracle::potential(w, one, m);
    double i_q = SqrtMeasure(one, w).energy();
    need(std::abs(family_expectation(fp) - e_q) < 1e-5, "family expectation");
    need(std::abs(family_log_moment(fp) - l_q) < 1e-5, "family log moment");
    need(std::abs(family_potential(fp, m) - u_q) < 1e-5, "family potential");
    need(std::abs(family_energy(fp) - i_q) < 1e-5, "family energy");
    if (draws % 25 == 0) need(std::abs(family_energy(fp) - oracle::energy(w, one)) < 1e-5, "family energy nested");
  }

  // Strict concavity of the energy.
  for (int trial = 0; trial < 50; ++trial) {
    auto random_measure = [&] {
      double f = 1 + 3 * u(rng), q = u(rng), r = u(rng);
      SqrtMeasure raw(s, [=](std::size_t k, double y) { return 1.0 + r * k + 0.5 * q * std::cos(f * y); });
      double mass = raw.mass();
      return SqrtMeasure::linear_combination({{1.0 / mass, &raw}});
    };
    SqrtMeasure m1 = random_measure(), m2 = random_measure();
    auto mid = SqrtMeasure::linear_combination({{0.5, &m1}, {0.5, &m2}});
    need(mid.energy() - 0.5 * (m1.energy() + m2.energy()) > 0, "energy concavity");
  }

  // Gradient against one-sided differences at h and h/2.
  {
    SupportSet at({0.04, 0.8, 1.2, 5.6});
    auto A = polys({"x", "x-1"});
    auto grad = gradient(at, A, DescentConfig{});
    double f0 = objective(residuals(at, A));
    for (std::size_t i = 0; i < 4; ++i) {
      auto one_sided = [&](double h) {
        auto e = at.endpoints();
        e[i] += h;
        return (objective(residuals(SupportSet(e), A)) - f0) / h;
      };
      double d1 = one_sided(1e-4), d2 = one_sided(5e-5);
      double ratio = std::abs(d1 - grad.values[i]) / std::abs(d2 - grad.values[i]);
      need(std::abs(ratio - 2) < 0.1, "gradient error order");
      need(std::abs(2 * d2 - d1 - grad.values[i]) < 1e-3 * std::abs(d1 - grad.values[i]) + 1e-9, "gradient Richardson");
    }
  }

  // Weak duality on every certificate produced or shipped.
  for (const char* name : {"schur", "siegel", "two_polys", "three_polys", "four_polys", "five_polys", "seven_polys"})
    produced.push_back(fixture(name));
  for (const auto& c : produced) {
    auto rep = certify(c);
    need(rep.certified_bound <= rep.expectation + 1e-6, "weak duality");
  }

  std::string detail = bad.empty() ? "all property checks hold" : "failed:";
  for (const auto& b : bad) detail += " " + b + ";";
  report(7, bad.empty(), detail + fmt(" (%zu certificates checked for weak duality)", produced.size()));
}

}  // namespace

int main() {
  auto guarded = [](int id, void (*fn)()) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  };
  guarded(1, criterion_schur);
  guarded(2, criterion_siegel);
  guarded(3, criterion_two_polys);
  guarded(4, criterion_three_polys);
  guarded(5, criterion_four_five_polys);
  guarded(6, criterion_record);
  guarded(7, criterion_properties);
  return failures == 0 ? 0 : 1;
}
