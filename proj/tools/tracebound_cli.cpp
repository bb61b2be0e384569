// Command-line front end: solve, verify, closed-form, density, residuals.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracebound/certificate.hpp"
#include "tracebound/closedform.hpp"
#include "tracebound/descent.hpp"
#include "tracebound/errors.hpp"
#include "tracebound/measures.hpp"

using namespace tracebound;

namespace {

enum Exit { kOk = 0, kFail = 1, kStalled = 2, kInfeasible = 3, kMalformed = 4 };

std::vector<IntegerPolynomial> parse_polys(const std::vector<std::string>& texts) {
  std::vector<IntegerPolynomial> out;
  for (const auto& t : texts) out.push_back(IntegerPolynomial::parse(t));
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw ParseError("bad number \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

struct Options {
  std::vector<std::string> polys;
  std::string init;
  std::string output;
  std::string cert_path;
  int nodes = 256;
  double fd_step = 1e-6;
  long max_iters = 100000;
  double tol = 1e-16;
  long checkpoint_every = 0;
  unsigned threads = 0;
  bool json = false;
  bool raw_boundary = false;
  int samples = 200;
  std::string which = "both";
};

QuadratureConfig quadrature(const Options& o) {
  QuadratureConfig q;
  q.nodes_per_interval = o.nodes;
  q.validate();
  return q;
}

int cmd_solve(const Options& o) {
  std::vector<IntegerPolynomial> polys;
  try {
    polys = parse_polys(o.polys);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  }

  DescentConfig cfg;
  cfg.quadrature = quadrature(o);
  cfg.fd_step = o.fd_step;
  cfg.max_iters = o.max_iters;
  cfg.objective_tol = o.tol;
  cfg.threads = o.threads;
  cfg.normalized_boundary = !o.raw_boundary;
  cfg.on_iteration = [&](const DescentState& st, const MeasureBundle& mu) {
    std::fprintf(stderr, "%ld,%.6e,%.12f\n", st.iteration, st.objective, mu.lambda());
    if (o.checkpoint_every > 0 && st.iteration % o.checkpoint_every == 0 && !o.output.empty() && o.output != "-")
      write_text(o.output, certificate_to_json(make_certificate(mu)));
  };

  SupportSet init;
  try {
    if (!o.init.empty()) {
      init = SupportSet(parse_list(o.init));
    } else if (polys.empty()) {
      // Closed form is authoritative for the empty set.
      SchurSolution s = solve_schur();
      init = SupportSet({s.a, s.b});
    } else {
      init = default_init(polys);
    }
    candidate_measure(init, polys, cfg.quadrature);
  } catch (const std::exception& e) {
    std::cerr << "error: infeasible initial support: " << e.what() << "\n";
    return kInfeasible;
  }

  if (polys.empty() && o.init.empty()) cfg.max_iters = 0;
  try {
    DescentResult res = run_descent(init, polys, cfg);
    Certificate cert = make_certificate(res.bundle);
    write_text(o.output.empty() ? std::string("certificate.json") : o.output, certificate_to_json(cert));
    std::printf("lambda=%.10f certified=%.10f iters=%ld\n", cert.lambda, cert.certified_bound, res.state.iteration);
    return kOk;
  } catch (const Stalled& e) {
    std::cerr << "stalled: " << e.what() << "\n";
    return kStalled;
  }
}

int cmd_verify(const Options& o) {
  Certificate cert;
  try {
    cert = certificate_from_json(read_file(o.cert_path));
  } catch (const Error& e) {
    std::cerr << "error: malformed certificate: " << e.what() << "\n";
    return kMalformed;
  }
  VerificationReport rep = certify(cert, quadrature(o));
  std::cout << (o.json ? report_to_json(rep) : format_report(rep));
  return rep.pass ? kOk : kFail;
}

int cmd_density(const Options& o) {
  try {
    Certificate cert = certificate_from_json(read_file(o.cert_path));
    MeasureBundle mu = candidate_measure(SupportSet(cert.endpoints), cert.polys, quadrature(o));
    auto samples = density_samples([&](double x) { return mu.target_density(x); }, mu.support(), o.samples);
    write_text(o.output, density_csv(samples));
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: malformed certificate: " << e.what() << "\n";
    return kMalformed;
  }
}

int cmd_closed_form(const Options& o) {
  if (o.which == "schur" || o.which == "both") {
    SchurSolution s = solve_schur();
    std::printf("schur  lambda=%.17g a=%.17g b=%.17g\n", s.lambda, s.a, s.b);
  }
  if (o.which == "siegel" || o.which == "both") {
    SiegelSolution s = solve_siegel();
    std::printf("siegel lambda=%.17g g=%.17g nu=%.17g a=%.17g b=%.17g\n", s.E, s.g, s.nu, s.a, s.b);
  }
  return kOk;
}

int cmd_residuals(const Options& o) {
  try {
    auto polys = parse_polys(o.polys);
    SupportSet sigma = o.init.empty() ? default_init(polys) : SupportSet(parse_list(o.init));
    MeasureBundle mu = candidate_measure(sigma, polys, quadrature(o));
    auto r = residuals(mu, !o.raw_boundary);
    for (std::size_t i = 0; i < r.size(); ++i) std::printf("%zu %.6e\n", i, r[i]);
    std::printf("objective %.6e lambda %.12f\n", objective(r), mu.lambda());
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-problem measures, support descent and dual certificates"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--nodes", o.nodes, "Quadrature nodes per interval (power of two)");
  };

  auto* solve = app.add_subcommand("solve", "Optimise the support for a polynomial set and write a certificate");
  solve->add_option("-p,--poly", o.polys, "Polynomial in A, repeatable");
  solve->add_option("--init", o.init, "Comma-separated initial endpoints");
  solve->add_option("-o,--output", o.output, "Certificate path (default certificate.json, - for stdout)");
  solve->add_option("--fd-step", o.fd_step, "Finite difference step");
  solve->add_option("--max-iters", o.max_iters, "Iteration cap");
  solve->add_option("--tol", o.tol, "Objective tolerance");
  solve->add_option("--checkpoint-every", o.checkpoint_every, "Write the certificate every N iterations");
  solve->add_option("--threads", o.threads, "Gradient worker threads (0: all cores)");
  solve->add_flag("--raw-boundary", o.raw_boundary, "Use raw boundary densities in the objective");
  add_common(solve);

  auto* verify = app.add_subcommand("verify", "Check a certificate");
  verify->add_option("certificate", o.cert_path)->required();
  verify->add_flag("--json", o.json, "Print the report as JSON");
  add_common(verify);

  auto* density = app.add_subcommand("density", "Export the density of a certificate as CSV");
  density->add_option("certificate", o.cert_path)->required();
  density->add_option("-o,--output", o.output, "CSV path (default stdout)");
  density->add_option("--samples", o.samples, "Samples per interval");
  add_common(density);

  auto* closed = app.add_subcommand("closed-form", "Print the closed-form Schur and Siegel solutions");
  closed->add_option("which", o.which, "schur, siegel or both")->check(CLI::IsMember({"schur", "siegel", "both"}));

  auto* resid = app.add_subcommand("residuals", "Print optimality residuals at a support");
  resid->add_option("-p,--poly", o.polys, "Polynomial in A, repeatable");
  resid->add_option("--init", o.init, "Comma-separated endpoints");
  resid->add_flag("--raw-boundary", o.raw_boundary, "Raw boundary densities");
  add_common(resid);

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(o);
    if (verify->parsed()) return cmd_verify(o);
    if (density->parsed()) return cmd_density(o);
    if (closed->parsed()) return cmd_closed_form(o);
    if (resid->parsed()) return cmd_residuals(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kOk;
}
