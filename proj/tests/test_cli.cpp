#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tracebound/closedform.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(TRACEBOUND_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const char* name) { return std::string(TRACEBOUND_FIXTURE_DIR) + "/" + name + ".json"; }

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / ("tracebound_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<double, double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "x,density");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace

TEST_CASE("closed-form subcommand") {
  auto r = run("closed-form");
  CHECK(r.code == 0);
  CHECK(r.out.find("lambda=1.64872127") != std::string::npos);
  CHECK(r.out.find("lambda=1.73361051") != std::string::npos);
}

TEST_CASE("solve with the empty set uses the closed form") {
  auto dir = scratch_dir();
  auto r = run("solve -o " + (dir / "schur.json").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("lambda=1.6487212707") != std::string::npos);
  CHECK(run("verify " + (dir / "schur.json").string()).code == 0);
}

TEST_CASE("solve output is deterministic") {
  auto dir = scratch_dir();
  std::string args = "solve -p x -p x-1 --init 0.04,0.8,1.2,5.6 --max-iters 3 --tol 0 ";
  CHECK(run(args + "--threads 1 -o " + (dir / "a.json").string()).code == 0);
  CHECK(run(args + "--threads 3 -o " + (dir / "b.json").string()).code == 0);
  CHECK(read(dir / "a.json") == read(dir / "b.json"));
  CHECK(run("verify " + (dir / "a.json").string()).code <= 1);
}

TEST_CASE("solve rejects infeasible starts") {
  CHECK(run("solve -p x-1 --init 0.5,2 -o /dev/null").code == 3);
  CHECK(run("solve -p x -p x-1 --init 0.1,5 -o /dev/null").code == 3);
  CHECK(run("solve -p x-30 -o /dev/null").code == 3);
  CHECK(run("solve -p x^ -o /dev/null").code == 3);
}

TEST_CASE("verify exit codes") {
  CHECK(run("verify " + fixture("two_polys")).code == 0);
  auto dir = scratch_dir();
  std::string text = read(fixture("two_polys"));
  auto pos = text.find("\"lambda\": ") + 10;
  std::string tampered = text.substr(0, pos) + "1.8" + text.substr(text.find(',', pos));
  std::ofstream(dir / "tampered.json") << tampered;
  CHECK(run("verify " + (dir / "tampered.json").string()).code == 1);
  std::ofstream(dir / "missing.json") << "{\"polys\": [\"x\"]}";
  CHECK(run("verify " + (dir / "missing.json").string()).code == 4);
  CHECK(run("verify " + (dir / "does_not_exist.json").string()).code == 4);
  auto js = run("verify --json " + fixture("siegel"));
  CHECK(js.code == 0);
  CHECK(js.out.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("density export for the single root at zero matches the closed form") {
  auto r = run("density " + fixture("siegel") + " --samples 101");
  REQUIRE(r.code == 0);
  auto s = tracebound::solve_siegel();
  const double a = s.a, b = s.b, g = std::sqrt(a * b);
  auto rows = parse_csv(r.out);
  CHECK(rows.size() == 101);
  for (auto [x, d] : rows) {
    double closed = 2 * std::sqrt(std::max(0.0, (b - x) * (x - a))) / (std::numbers::pi * (a + b - 2 * g) * x);
    CHECK(std::abs(d - closed) < 1e-6);
  }
}

TEST_CASE("density export shapes") {
  auto schur = parse_csv(run("density " + fixture("schur") + " --samples 50").out);
  CHECK(schur.back().first == doctest::Approx(4 * std::exp(0.5)));
  CHECK(schur.back().second == 0.0);

  auto dir = scratch_dir();
  auto r = run("density " + fixture("seven_polys") + " --samples 40 -o " + (dir / "d.csv").string());
  REQUIRE(r.code == 0);
  auto rows = parse_csv(read(dir / "d.csv"));
  CHECK(rows.size() == 16 * 40);
  int zeros = 0;
  for (auto [x, d] : rows) {
    CHECK(d >= 0);
    if (d == 0.0) ++zeros;
  }
  CHECK(zeros == 32);
  CHECK(run("density " + (dir / "nothing.json").string()).code == 4);
}
