#include "tracebound/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include "json.hpp"

#include "tracebound/errors.hpp"

namespace tracebound {

namespace {

using ordered_json = nlohmann::ordered_json;

const double kLog18 = std::log(18.0);
constexpr double kWindow = 1e-3;

double lambda_for_root(const Certificate& cert, const MeasureBundle& mu, std::size_t r) {
  return cert.lambda_q[mu.roots()[r].poly];
}

// 20 points spread over the intervals, away from the endpoints.
std::vector<double> lambda_points(const SupportSet& sigma) {
  const std::size_t n = sigma.interval_count();
  const std::size_t per = (20 + n - 1) / n;
  std::vector<double> xs;
  for (std::size_t j = 0; j < 20; ++j) {
    Interval iv = sigma.interval(j % n);
    double t = (static_cast<double>(j / n) + 0.5) / static_cast<double>(per);
    xs.push_back(iv.lo + t * (iv.hi - iv.lo));
  }
  return xs;
}

double lambda_at(const MeasureBundle& mu, double x) {
  double v = x - mu.lambda0() * (mu.potential(x) - 0.5 * mu.energy());
  for (std::size_t j = 0; j < mu.polys().size(); ++j)
    v -= mu.lambda_q(j) * std::log(std::abs(mu.polys()[j](x)));
  return v;
}

double max_delta(const std::vector<double>& d) {
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

// int_window f(y) / (x - y)^2 dy for a window touching an endpoint of the
// piece; y = endpoint -+ u^2 removes the inverse square root.
double window_integral(const ChebPiece& p, bool at_left, double width, double x) {
  const double a = p.iv.lo, b = p.iv.hi, len = b - a;
  auto integrand = [&](double u) {
    double y = at_left ? a + u * u : b - u * u;
    double d = x - y;
    return p.weight(y) * 2.0 / (std::numbers::pi * std::sqrt(len - u * u)) / (d * d);
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, std::sqrt(width));
}

struct Window {
  std::size_t piece;
  bool at_left;
  double lo, hi, width;
};

double distance_to(const std::vector<Window>& ws, double x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& w : ws) d = std::min(d, x < w.lo ? w.lo - x : (x > w.hi ? x - w.hi : 0.0));
  return d;
}

double grid_minimum(const std::function<double(double)>& f, double u, double v) {
  const int n = std::max(200, static_cast<int>(std::ceil(1000.0 * (v - u))));
  const double h = (v - u) / n;
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int q = 0; q < n; ++q) {
    double val = f(u + (q + 0.5) * h);
    if (val < best) {
      best = val;
      arg = q;
    }
  }
  // Ten times finer around the coarse minimum.
  double lo = u + std::max(0.0, arg - 0.5) * h, hi = u + std::min<double>(n, arg + 1.5) * h;
  for (int q = 0; q <= 20; ++q) {
    double x = lo + (hi - lo) * q / 20.0;
    if (x <= u || x >= v) continue;
    best = std::min(best, f(x));
  }
  return best;
}

}  // namespace

Certificate make_certificate(const MeasureBundle& mu) {
  Certificate cert;
  cert.polys = mu.polys();
  cert.endpoints = mu.support().endpoints();
  double acc = 0.0;
  auto xs = lambda_points(mu.support());
  for (double x : xs) acc += lambda_at(mu, x);
  cert.lambda = acc / static_cast<double>(xs.size());
  cert.lambda0 = mu.lambda0();
  for (std::size_t j = 0; j < mu.polys().size(); ++j) cert.lambda_q.push_back(mu.lambda_q(j));
  cert.c = mu.c();
  cert.delta = max_delta(mu.boundary_ratios());
  cert.certified_bound = cert.lambda - cert.delta * cert.lambda0 * kLog18;
  return cert;
}

std::string certificate_to_json(const Certificate& cert) {
  ordered_json j;
  j["polys"] = ordered_json::array();
  for (const auto& q : cert.polys) j["polys"].push_back(q.to_string());
  j["endpoints"] = cert.endpoints;
  j["lambda"] = cert.lambda;
  j["lambda0"] = cert.lambda0;
  j["lambdaQ"] = ordered_json::object();
  for (std::size_t i = 0; i < cert.polys.size(); ++i) j["lambdaQ"][cert.polys[i].to_string()] = cert.lambda_q[i];
  j["c"] = cert.c;
  j["delta"] = cert.delta;
  j["certified_bound"] = cert.certified_bound;
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const ordered_json& {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("certificate is missing \"") + key + "\"");
    return j.at(key);
  };
  auto number = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_number()) throw ParseError(std::string("certificate field \"") + key + "\" must be a number");
    return v.get<double>();
  };
  Certificate cert;
  const auto& polys = need("polys");
  const auto& ends = need("endpoints");
  const auto& lq = need("lambdaQ");
  if (!polys.is_array() || !ends.is_array() || !lq.is_object()) throw ParseError("certificate fields have wrong types");
  for (const auto& p : polys) {
    if (!p.is_string()) throw ParseError("polys must be strings");
    cert.polys.push_back(IntegerPolynomial::parse(p.get<std::string>()));
  }
  for (const auto& e : ends) {
    if (!e.is_number()) throw ParseError("endpoints must be numbers");
    cert.endpoints.push_back(e.get<double>());
  }
  cert.lambda = number("lambda");
  cert.lambda0 = number("lambda0");
  cert.c = number("c");
  cert.delta = number("delta");
  cert.certified_bound = number("certified_bound");
  if (lq.size() != cert.polys.size()) throw ParseError("lambdaQ must have one entry per polynomial");
  cert.lambda_q.assign(cert.polys.size(), 0.0);
  for (const auto& [key, value] : lq.items()) {
    if (!value.is_number()) throw ParseError("lambdaQ values must be numbers");
    IntegerPolynomial q = IntegerPolynomial::parse(key);
    auto it = std::find(cert.polys.begin(), cert.polys.end(), q);
    if (it == cert.polys.end()) throw ParseError("lambdaQ key " + key + " is not in polys");
    cert.lambda_q[it - cert.polys.begin()] = value.get<double>();
  }
  return cert;
}

std::vector<double> support_samples(const SupportSet& sigma, int count) {
  std::vector<double> xs;
  for (std::size_t k = 0; k < sigma.interval_count(); ++k) {
    Interval iv = sigma.interval(k);
    for (int j = 0; j < count; ++j) xs.push_back(iv.lo + (iv.hi - iv.lo) * j / (count - 1));
  }
  return xs;
}

double dual_slack(const Certificate& cert, const MeasureBundle& mu, double x) {
  double v = x - cert.lambda - cert.lambda0 * (mu.potential(x) - 0.5 * mu.energy());
  for (std::size_t j = 0; j < cert.polys.size(); ++j) {
    double q = std::abs(cert.polys[j](x));
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    v -= cert.lambda_q[j] * std::log(q);
  }
  return v;
}

double check_equality_on_support(const Certificate& cert, const MeasureBundle& mu) {
  double dev = 0.0;
  for (double x : support_samples(mu.support(), 100)) dev = std::max(dev, std::abs(dual_slack(cert, mu, x)));
  return dev;
}

double check_equality_on_support(const Certificate& cert) {
  return check_equality_on_support(cert, candidate_measure(SupportSet(cert.endpoints), cert.polys));
}

std::vector<double> boundary_ratios(const Certificate& cert) {
  return candidate_measure(SupportSet(cert.endpoints), cert.polys).boundary_ratios();
}

std::vector<GapConvexity> check_gap_convexity(const Certificate& cert, const MeasureBundle& mu) {
  const SupportSet& s = mu.support();
  const auto& a = s.endpoints();
  const auto& deltas = mu.boundary_ratios();
  const double delta = max_delta(deltas);
  const auto& mp = mu.measure().pieces();
  const auto& ep = mu.equilibrium().pieces();

  std::vector<GapConvexity> out;
  for (std::size_t i = 0; i < s.gap_count(); ++i) {
    Interval g = s.gap(i);
    std::vector<double> inside;
    for (const auto& r : mu.roots())
      if (r.alpha > g.lo && r.alpha < g.hi) inside.push_back(r.alpha);
    if (inside.size() != 1)
      throw MultipleRootsInGap("gap " + std::to_string(i) + " holds " + std::to_string(inside.size()) + " roots");
    GapConvexity gc;
    gc.gap = i;
    gc.root = inside[0];

    for (int side = 0; side < 2; ++side) {
      const std::size_t j = side == 0 ? 2 * i + 1 : 2 * i + 2;
      const double dloc = deltas[j];
      // f = mu - delta_j mu_eq, piece by piece.
      std::vector<ChebPiece> fp;
      for (std::size_t k = 0; k < mp.size(); ++k) fp.push_back(combine({{1.0, &mp[k]}, {-dloc, &ep[k]}}));

      // Endpoints where f starts negative get a window; everything else must be >= 0.
      std::vector<Window> windows;
      double dneg = delta;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(deltas[k] < dloc)) continue;
        Interval iv = s.interval(k / 2);
        double w = std::min(kWindow, 0.5 * (iv.hi - iv.lo));
        bool left = (k % 2 == 0);
        windows.push_back({k / 2, left, left ? iv.lo : iv.hi - w, left ? iv.lo + w : iv.hi, w});
        dneg = std::max(dneg, dloc - deltas[k]);
      }
      for (std::size_t k = 0; k < fp.size(); ++k) {
        Interval iv = s.interval(k);
        double scale = 0.0;
        for (const auto& b : fp[k].beta) scale = std::max(scale, std::abs(b));
        for (int q = 0; q <= 400; ++q) {
          double y = q == 400 ? iv.hi : iv.lo + (iv.hi - iv.lo) * q / 400.0;
          if (distance_to(windows, y) == 0.0) continue;
          if (fp[k].weight(y) < -1e-13 * scale) gc.sign_pattern_ok = false;
        }
      }

      auto lower_bound = [&](double x) {
        double v = 0.0;
        for (std::size_t r = 0; r < mu.roots().size(); ++r) {
          double d = x - mu.roots()[r].alpha;
          v += lambda_for_root(cert, mu, r) / (d * d);
        }
        double pos = 0.0;
        for (const auto& p : fp) pos -= p.log_potential_d2(x);
        for (const auto& w : windows) pos -= window_integral(fp[w.piece], w.at_left, w.width, x);
        v += cert.lambda0 * pos;
        if (!windows.empty()) {
          double d = distance_to(windows, x);
          v -= dneg * cert.lambda0 / (d * d);
        }
        return v;
      };
      double u = side == 0 ? g.lo : gc.root, v = side == 0 ? gc.root : g.hi;
      (side == 0 ? gc.left_min : gc.right_min) = grid_minimum(lower_bound, u, v);
    }
    out.push_back(gc);
  }
  return out;
}

std::vector<bool> check_gap_convexity(const Certificate& cert) {
  MeasureBundle mu = candidate_measure(SupportSet(cert.endpoints), cert.polys);
  std::vector<bool> ok;
  for (const auto& g : check_gap_convexity(cert, mu)) ok.push_back(g.ok());
  return ok;
}

VerificationReport certify(const Certificate& cert, const QuadratureConfig& cfg) {
  VerificationReport rep;
  auto fail = [&](std::string why) { rep.failures.push_back(std::move(why)); };
  try {
    if (cert.lambda_q.size() != cert.polys.size()) throw InvalidArgument("lambdaQ does not match polys");
    MeasureBundle mu = candidate_measure(SupportSet(cert.endpoints), cert.polys, cfg);

    // Outside the gaps the only root allowed is 0, left of the support.
    for (const auto& r : mu.roots()) {
      bool in_gap = false;
      for (std::size_t i = 0; i < mu.support().gap_count(); ++i)
        in_gap = in_gap || (r.alpha > mu.support().gap(i).lo && r.alpha < mu.support().gap(i).hi);
      if (!in_gap && r.alpha != 0.0) fail("root " + std::to_string(r.alpha) + " outside the gaps is not 0");
    }

    rep.equality_max_dev = check_equality_on_support(cert, mu);
    std::vector<double> lam;
    for (double x : lambda_points(mu.support())) lam.push_back(lambda_at(mu, x));
    rep.lambda_spread = *std::max_element(lam.begin(), lam.end()) - *std::min_element(lam.begin(), lam.end());
    rep.deltas = mu.boundary_ratios();
    rep.delta_max = max_delta(rep.deltas);
    rep.gaps = check_gap_convexity(cert, mu);
    for (const auto& g : rep.gaps) rep.convexity_ok_per_gap.push_back(g.ok());

    rep.grid_min_g = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 10000; ++q) rep.grid_min_g = std::min(rep.grid_min_g, dual_slack(cert, mu, 18.0 * q / 9999.0));
    rep.certified_bound = cert.lambda - rep.delta_max * cert.lambda0 * kLog18;
    rep.expectation = mu.mean();

    if (!(rep.equality_max_dev < 1e-6)) fail("equality deviation " + std::to_string(rep.equality_max_dev) + " >= 1e-6");
    for (const auto& g : rep.gaps)
      if (!g.ok()) fail("convexity fails in gap " + std::to_string(g.gap));
    if (!(cert.lambda0 > 0)) fail("lambda0 is not positive");
    for (double v : cert.lambda_q)
      if (!(v >= 0)) fail("negative lambdaQ");
    if (!(rep.grid_min_g >= -1e-6)) fail("dual slack below -1e-6 on the grid");
    if (cert.certified_bound > rep.certified_bound + 1e-9) fail("stored certified_bound exceeds the recomputed one");
  } catch (const Error& e) {
    fail(e.what());
  }
  rep.pass = rep.failures.empty();
  return rep;
}

std::string format_report(const VerificationReport& r) {
  std::ostringstream os;
  char buf[160];
  auto line = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-20s %.12g\n", name, v);
    os << buf;
  };
  line("equality_max_dev", r.equality_max_dev);
  line("lambda_spread", r.lambda_spread);
  line("delta_max", r.delta_max);
  for (const auto& g : r.gaps) {
    std::snprintf(buf, sizeof buf, "gap %-3zu root %-12.8g left %-12.5g right %-12.5g %s\n", g.gap, g.root, g.left_min,
                  g.right_min, g.ok() ? "ok" : "FAIL");
    os << buf;
  }
  line("grid_min_g", r.grid_min_g);
  line("expectation", r.expectation);
  line("certified_bound", r.certified_bound);
  for (const auto& f : r.failures) os << "failure: " << f << "\n";
  os << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["equality_max_dev"] = r.equality_max_dev;
  j["lambda_spread"] = r.lambda_spread;
  j["deltas"] = r.deltas;
  j["delta_max"] = r.delta_max;
  j["convexity_ok_per_gap"] = r.convexity_ok_per_gap;
  j["grid_min_g"] = r.grid_min_g;
  j["expectation"] = r.expectation;
  j["certified_bound"] = r.certified_bound;
  j["failures"] = r.failures;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace tracebound
