#include "tracebound/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "tracebound/errors.hpp"

namespace tracebound {

namespace {

// DCT-II plans by size. Planning is not thread-safe; executing a plan on new arrays is.
fftw_plan dct_plan(int n) {
  static std::mutex mutex;
  static std::map<int, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> in(n), out(n);
  fftw_plan plan = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_REDFT10, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return plans.emplace(n, plan).first->second;
}

struct OffAxis {
  double t, s, rho, sign;
};

OffAxis off_axis(double t) {
  double at = std::abs(t);
  double s = std::sqrt((at - 1.0) * (at + 1.0));
  double sign = t < 0 ? -1.0 : 1.0;
  return {t, s, sign / (at + s), sign};
}

}  // namespace

double ChebPiece::weight(double y) const {
  if (beta.empty()) return 0.0;
  double t = (y - iv.mid()) / iv.half_width();
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t n = beta.size(); n-- > 1;) {
    double b0 = 2.0 * t * b1 - b2 + beta[n];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + beta[0];
}

double ChebPiece::mean() const {
  double b0 = beta.empty() ? 0.0 : beta[0];
  double b1 = beta.size() > 1 ? beta[1] : 0.0;
  return iv.mid() * b0 + 0.5 * iv.half_width() * b1;
}

double ChebPiece::log_potential(double x) const {
  if (beta.empty()) return 0.0;
  const double c = iv.half_width();
  const double t = (x - iv.mid()) / c;
  double acc = beta[0] * std::log(c);
  if (std::abs(t) <= 1.0) {
    acc -= beta[0] * std::numbers::ln2;
    double tm1 = 1.0, tn = t;
    for (std::size_t n = 1; n < beta.size(); ++n) {
      acc -= beta[n] * tn / static_cast<double>(n);
      double next = 2.0 * t * tn - tm1;
      tm1 = tn;
      tn = next;
    }
    return acc;
  }
  OffAxis o = off_axis(t);
  acc += beta[0] * (std::log(std::abs(t) + o.s) - std::numbers::ln2);
  double p = o.rho;
  for (std::size_t n = 1; n < beta.size(); ++n) {
    acc -= beta[n] * p / static_cast<double>(n);
    p *= o.rho;
  }
  return acc;
}

double ChebPiece::log_potential_d1(double x) const {
  const double c = iv.half_width();
  const double t = (x - iv.mid()) / c;
  if (std::abs(t) <= 1.0) throw InvalidArgument("log_potential_d1 evaluated on the support");
  OffAxis o = off_axis(t);
  double sum = 0.0, p = 1.0;
  for (double b : beta) {
    sum += b * p;
    p *= o.rho;
  }
  return o.sign * sum / (o.s * c);
}

double ChebPiece::log_potential_d2(double x) const {
  const double c = iv.half_width();
  const double t = (x - iv.mid()) / c;
  if (std::abs(t) <= 1.0) throw InvalidArgument("log_potential_d2 evaluated on the support");
  OffAxis o = off_axis(t);
  const double q = o.s * o.s;
  const double a = std::abs(t) / (q * o.s);
  double sum = 0.0, p = 1.0;
  for (std::size_t n = 0; n < beta.size(); ++n) {
    sum -= beta[n] * p * (static_cast<double>(n) / q + a);
    p *= o.rho;
  }
  return sum / (c * c);
}

std::vector<double> chebyshev_nodes(Interval iv, int n) {
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) y[j] = iv.mid() + iv.half_width() * std::cos((j + 0.5) * std::numbers::pi / n);
  return y;
}

ChebPiece chebyshev_from_values(Interval iv, const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n == 0) return {iv, {}};
  // REDFT10 gives 2 sum_j v_j cos(k (2j + 1) pi / 2n).
  std::vector<double> in(values), out(n);
  fftw_execute_r2r(dct_plan(n), in.data(), out.data());
  ChebPiece piece{iv, std::move(out)};
  for (int k = 0; k < n; ++k) piece.beta[k] *= (k == 0 ? 0.5 : 1.0) / n;
  return piece;
}

ChebPiece chebyshev_fit(const std::function<double(double)>& w, Interval iv, int start_n, double tol, int max_n) {
  double prev_tail = std::numeric_limits<double>::infinity();
  for (int n = start_n; n <= max_n; n *= 2) {
    std::vector<double> y = chebyshev_nodes(iv, n), v(n);
    for (int j = 0; j < n; ++j) v[j] = w(y[j]);
    ChebPiece piece = chebyshev_from_values(iv, v);
    double scale = 0.0, tail = 0.0;
    for (int k = 0; k < n; ++k) {
      scale = std::max(scale, std::abs(piece.beta[k]));
      if (k >= n / 2) tail = std::max(tail, std::abs(piece.beta[k]));
    }
    if (!std::isfinite(scale)) throw NoConvergence("non-finite weight in chebyshev_fit");
    // Accept at tolerance, or once the tail has stalled at the rounding floor
    // of the weight evaluation.
    bool stalled = tail > 0.25 * prev_tail && tail <= 1e-11 * scale;
    if (tail <= tol * scale || scale == 0.0 || stalled) {
      piece.beta.resize(n / 2);
      return piece;
    }
    prev_tail = tail;
  }
  throw NoConvergence("chebyshev_fit did not resolve the weight");
}

ChebPiece combine(const std::vector<std::pair<double, const ChebPiece*>>& terms) {
  ChebPiece out;
  if (terms.empty()) return out;
  out.iv = terms.front().second->iv;
  std::size_t len = 0;
  for (const auto& [s, p] : terms) len = std::max(len, p->beta.size());
  out.beta.assign(len, 0.0);
  for (const auto& [s, p] : terms)
    for (std::size_t n = 0; n < p->beta.size(); ++n) out.beta[n] += s * p->beta[n];
  return out;
}

}  // namespace tracebound
