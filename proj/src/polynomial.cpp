#include "tracebound/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "tracebound/errors.hpp"

namespace tracebound {

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

RealPolynomial RealPolynomial::constant(double c) { return RealPolynomial({c}); }

RealPolynomial RealPolynomial::from_roots(const std::vector<double>& roots, double leading) {
  std::vector<double> c{leading};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return RealPolynomial(std::move(c));
}

void RealPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double RealPolynomial::operator[](int i) const {
  return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : 0.0;
}

double RealPolynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RealPolynomial RealPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return RealPolynomial(std::move(d));
}

double RealPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

RealPolynomial operator+(const RealPolynomial& p, const RealPolynomial& q) {
  std::vector<double> c(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < p.coeffs_.size(); ++i) c[i] += p.coeffs_[i];
  for (std::size_t i = 0; i < q.coeffs_.size(); ++i) c[i] += q.coeffs_[i];
  return RealPolynomial(std::move(c));
}

RealPolynomial operator-(const RealPolynomial& p, const RealPolynomial& q) { return p + (-1.0) * q; }

RealPolynomial operator*(const RealPolynomial& p, const RealPolynomial& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<double> c(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < q.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * q.coeffs_[j];
  return RealPolynomial(std::move(c));
}

RealPolynomial operator*(double s, const RealPolynomial& p) {
  std::vector<double> c = p.coeffs_;
  for (double& v : c) v *= s;
  return RealPolynomial(std::move(c));
}

double eval(const RealPolynomial& p, double x) { return p(x); }

namespace {

// Rounding-error scale of Horner evaluation at x.
double eval_scale(const RealPolynomial& p, double x) {
  double acc = 0.0;
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * std::abs(x) + std::abs(*it);
  return acc;
}

// Roots of p in [lo, hi]. Critical points of p split the interval into
// monotone pieces, each holding at most one root. With strict == false a
// touching critical point is reported as a root instead of throwing, which
// the recursion needs for derivatives like 3x^2.
std::vector<double> roots_impl(const RealPolynomial& p, double lo, double hi, bool strict) {
  std::vector<double> out;
  const int d = p.degree();
  if (p.is_zero() || d == 0) return out;
  if (d == 1) {
    double r = -p[0] / p[1];
    if (r >= lo && r <= hi) out.push_back(r);
    return out;
  }

  std::vector<double> cuts{lo};
  for (double c : roots_impl(p.derivative(), lo, hi, false))
    if (c > cuts.back()) cuts.push_back(c);
  if (hi > cuts.back()) cuts.push_back(hi);

  const double tiny = 1e-12;
  auto near_zero = [&](double x) { return std::abs(p(x)) <= tiny * eval_scale(p, x); };

  // Interior critical points that touch zero are multiple roots.
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
    if (near_zero(cuts[k])) {
      if (strict) throw NonSquarefree("multiple root near " + std::to_string(cuts[k]));
      out.push_back(cuts[k]);
    }
  }

  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double u = cuts[k], v = cuts[k + 1];
    double fu = p(u), fv = p(v);
    bool u_interior = k > 0, v_interior = k + 2 < cuts.size();
    if (u_interior && near_zero(u)) continue;
    if (v_interior && near_zero(v)) continue;
    if (fu == 0.0) {
      if (!u_interior) out.push_back(u);
      continue;
    }
    if (fv == 0.0) {
      if (!v_interior) out.push_back(v);
      continue;
    }
    if ((fu < 0) == (fv < 0)) continue;
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve([&](double x) { return p(x); }, u, v, fu, fv, tol, iters);
    out.push_back(0.5 * (a + b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi) {
  if (p.is_zero()) throw InvalidArgument("real_roots of the zero polynomial");
  if (!(lo <= hi)) throw InvalidArgument("real_roots: empty interval");
  return roots_impl(p, lo, hi, true);
}

double resultant(const RealPolynomial& p, const RealPolynomial& q) {
  if (p.is_zero() || q.is_zero()) throw InvalidArgument("resultant of the zero polynomial");
  const int m = p.degree(), n = q.degree();
  if (m == 0) return std::pow(p[0], n);
  if (n == 0) return std::pow(q[0], m);
  const int N = m + n;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  for (int r = 0; r < n; ++r)
    for (int j = 0; j <= m; ++j) S(r, r + j) = p[m - j];
  for (int r = 0; r < m; ++r)
    for (int j = 0; j <= n; ++j) S(n + r, r + j) = q[n - j];
  return S.partialPivLu().determinant();
}

double discriminant(const RealPolynomial& p) {
  const int d = p.degree();
  if (d < 1) throw InvalidArgument("discriminant needs degree >= 1");
  double sign = ((d * (d - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * resultant(p, p.derivative()) / p.leading();
}

RealPolynomial lagrange_interpolate(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (points[i].first == points[j].first) throw DuplicateNode("duplicate interpolation node");

  // Newton divided differences, then expand into the monomial basis.
  std::vector<double> dd(n);
  for (std::size_t i = 0; i < n; ++i) dd[i] = points[i].second;
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (points[i].first - points[i - k].first);

  std::vector<double> c{dd[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= points[k].first * c[i];
    }
    next[0] += dd[k];
    c = std::move(next);
  }
  return RealPolynomial(std::move(c));
}

IntegerPolynomial::IntegerPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

IntegerPolynomial IntegerPolynomial::parse(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ParseError("empty polynomial");

  std::vector<std::int64_t> coeffs;
  std::size_t i = 0;
  auto read_int = [&](std::int64_t& out) {
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) return false;
    out = std::stoll(s.substr(start, i - start));
    return true;
  };

  bool first = true;
  while (i < s.size()) {
    std::int64_t sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = (s[i] == '-') ? -1 : 1;
      ++i;
    } else if (!first) {
      throw ParseError("expected '+' or '-' in \"" + std::string(text) + "\"");
    }
    first = false;

    std::int64_t coef = 1;
    bool has_coef = read_int(coef);
    if (has_coef && i < s.size() && s[i] == '*') ++i;
    int power = 0;
    if (i < s.size() && s[i] == 'x') {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::int64_t e = 0;
        if (!read_int(e)) throw ParseError("missing exponent in \"" + std::string(text) + "\"");
        power = static_cast<int>(e);
      }
    } else if (!has_coef) {
      throw ParseError("unexpected character in \"" + std::string(text) + "\"");
    }
    if (coeffs.size() <= static_cast<std::size_t>(power)) coeffs.resize(power + 1, 0);
    coeffs[power] += sign * coef;
  }
  IntegerPolynomial p(std::move(coeffs));
  if (p.coeffs().empty()) throw ParseError("zero polynomial");
  return p;
}

RealPolynomial IntegerPolynomial::to_real() const {
  std::vector<double> c(coeffs_.begin(), coeffs_.end());
  return RealPolynomial(std::move(c));
}

double IntegerPolynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + static_cast<double>(*it);
  return acc;
}

std::string IntegerPolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    std::int64_t c = coeffs_[k];
    if (c == 0) continue;
    std::int64_t mag = c < 0 ? -c : c;
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    if (mag != 1 || k == 0) out += std::to_string(mag);
    if (k >= 1) out += "x";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

}  // namespace tracebound
