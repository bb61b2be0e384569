#pragma once

#include <string>
#include <vector>

#include "tracebound/measures.hpp"
#include "tracebound/polynomial.hpp"

namespace tracebound {

/// Dual certificate: x >= lambda + sum lambda_Q log|Q(x)| + lambda0 (U_mu(x) - I(mu)/2)
/// with equality on the support, giving the lower bound lambda - delta lambda0 log 18.
struct Certificate {
  std::vector<IntegerPolynomial> polys;
  std::vector<double> endpoints;
  double lambda = 0.0;
  double lambda0 = 0.0;
  std::vector<double> lambda_q;  // aligned with polys
  double c = 0.0;                // density normalisation: c sqrt|H| / prod|Q|
  double delta = 0.0;
  double certified_bound = 0.0;
};

/// Certificate for the candidate measure; lambda averaged over 20 support samples.
Certificate make_certificate(const MeasureBundle& mu);

/// JSON with fields polys, endpoints, lambda, lambda0, lambdaQ, c, delta, certified_bound.
std::string certificate_to_json(const Certificate& cert);
/// Throws ParseError on malformed input.
Certificate certificate_from_json(const std::string& text);

struct GapConvexity {
  std::size_t gap = 0;
  double root = 0.0;
  double left_min = 0.0;   // lower bound minimum on (a_{2i+1}, root)
  double right_min = 0.0;  // lower bound minimum on (root, a_{2i+2})
  bool sign_pattern_ok = true;  // f >= 0 off the endpoint windows
  bool ok() const { return sign_pattern_ok && left_min > 0.0 && right_min > 0.0; }
};

struct VerificationReport {
  double equality_max_dev = 0.0;
  double lambda_spread = 0.0;
  std::vector<double> deltas;
  double delta_max = 0.0;
  std::vector<GapConvexity> gaps;
  std::vector<bool> convexity_ok_per_gap;
  double grid_min_g = 0.0;
  double certified_bound = 0.0;
  double expectation = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Support samples used by the checks: `count` evenly spaced points per interval.
std::vector<double> support_samples(const SupportSet& sigma, int count);

/// x - lambda - sum lambda_Q log|Q(x)| - lambda0 (U(x) - I/2) for the certificate's multipliers.
double dual_slack(const Certificate& cert, const MeasureBundle& mu, double x);

double check_equality_on_support(const Certificate& cert, const MeasureBundle& mu);
double check_equality_on_support(const Certificate& cert);
std::vector<double> boundary_ratios(const Certificate& cert);
/// Throws MultipleRootsInGap unless every gap holds exactly one root.
std::vector<GapConvexity> check_gap_convexity(const Certificate& cert, const MeasureBundle& mu);
std::vector<bool> check_gap_convexity(const Certificate& cert);
/// Runs every check and reports; never throws for a failed check.
VerificationReport certify(const Certificate& cert, const QuadratureConfig& cfg = {});

std::string format_report(const VerificationReport& report);
std::string report_to_json(const VerificationReport& report);

}  // namespace tracebound
