#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracebound {

/// Dense real polynomial, coefficients in ascending degree.
/// The zero polynomial has an empty coefficient vector and degree 0.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<double> coeffs);

  static RealPolynomial constant(double c);
  static RealPolynomial from_roots(const std::vector<double>& roots, double leading = 1.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
  double operator[](int i) const;

  double operator()(double x) const;
  RealPolynomial derivative() const;
  double max_abs_coeff() const;

  friend RealPolynomial operator+(const RealPolynomial& p, const RealPolynomial& q);
  friend RealPolynomial operator-(const RealPolynomial& p, const RealPolynomial& q);
  friend RealPolynomial operator*(const RealPolynomial& p, const RealPolynomial& q);
  friend RealPolynomial operator*(double s, const RealPolynomial& p);

 private:
  void trim();
  std::vector<double> coeffs_;
};

/// Horner evaluation.
double eval(const RealPolynomial& p, double x);

/// All real roots of p in [lo, hi], ascending, each to about 1e-13.
/// Throws NonSquarefree when a multiple root is detected.
std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi);

/// Sylvester resultant; equals lc(p)^deg(q) * prod q(alpha) over roots of p.
double resultant(const RealPolynomial& p, const RealPolynomial& q);

/// (-1)^(d(d-1)/2) Res(p, p') / lc(p).
double discriminant(const RealPolynomial& p);

/// Unique polynomial of degree < n through n points with distinct abscissae.
RealPolynomial lagrange_interpolate(const std::vector<std::pair<double, double>>& points);

/// Integer polynomial used for the constraint set. Ascending coefficients.
class IntegerPolynomial {
 public:
  IntegerPolynomial() = default;
  explicit IntegerPolynomial(std::vector<std::int64_t> coeffs);

  /// Parses strings like "x^2-3x+1", "x", "2*x^3 - 1".
  static IntegerPolynomial parse(std::string_view text);

  const std::vector<std::int64_t>& coeffs() const { return coeffs_; }
  int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  std::int64_t leading() const { return coeffs_.empty() ? 0 : coeffs_.back(); }
  bool is_monic() const { return leading() == 1; }

  RealPolynomial to_real() const;
  double operator()(double x) const;

  /// Canonical text form, e.g. "x^2-3x+1". Round-trips through parse.
  std::string to_string() const;

  friend bool operator==(const IntegerPolynomial&, const IntegerPolynomial&) = default;

 private:
  std::vector<std::int64_t> coeffs_;
};

}  // namespace tracebound
