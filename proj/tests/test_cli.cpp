#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "maxattn/cli/config.hpp"
#include "maxattn/cli/registry.hpp"
#include "maxattn/cli/report.hpp"
#include "maxattn/cli/runner.hpp"
#include "maxattn/errors.hpp"

using namespace maxattn;
using namespace maxattn::cli;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "maxattn-test-cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("registry lookups") {
  const auto s = resolve_target("sinprod", {std::nullopt, 1, 2, 1.0, 0});
  REQUIRE(s.single);
  CHECK(s.single(Matrix{{0.5, 0.0}}) == Matrix{{1.0, 1.0}});
  CHECK_THROWS_AS(resolve_target("sinprod", {std::nullopt, 2, 2, 1.0, 0}), ArgumentError);
  CHECK_THROWS_AS(resolve_target("nosuch", {}), ArgumentError);

  const auto c = resolve_target("const:0.25", {std::nullopt, 2, 3, 1.0, 0});
  CHECK(c.single(Matrix(2, 3)) == Matrix(2, 3, 0.25));
  CHECK(c.pair(Matrix(2, 3), Matrix(2, 3)) == Matrix(2, 3, 0.25));
  CHECK(*c.lipschitz == 0.0);

  const auto step = resolve_target("step1d", {std::nullopt, 1, 2, 1.0, 0});
  CHECK_FALSE(step.lipschitz.has_value());
  CHECK(step.single(Matrix{{-0.8, 0.3}}) == Matrix{{-0.8, -0.2}});
  CHECK(step1d_levels().size() == step1d_partition().size());

  const auto a = resolve_target("randlip", {std::nullopt, 1, 2, 1.0, 9});
  const auto b = resolve_target("randlip", {std::nullopt, 1, 2, 1.0, 9});
  CHECK(a.single(Matrix{{0.1, -0.4}}) == b.single(Matrix{{0.1, -0.4}}));
  CHECK(*a.lipschitz == *b.lipschitz);

  const auto add = resolve_target("addpair", {std::nullopt, 1, 1, 1.0, 0});
  CHECK(add.pair(Matrix{{0.25}}, Matrix{{0.5}}) == Matrix{{0.75}});
  CHECK(!add.single);
}

TEST_CASE("list parsing") {
  CHECK(parse_size_list("4, 8,16") == std::vector<std::size_t>{4, 8, 16});
  CHECK(parse_double_list("0.5") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_size_list("4,,8"), UsageError);
  CHECK_THROWS_AS(parse_size_list("-3"), UsageError);
  CHECK_THROWS_AS(parse_double_list("abc"), UsageError);
}

TEST_CASE("config file values yield to flags") {
  const fs::path cfg = scratch("config.json");
  std::ofstream(cfg) << R"({"command": "approximate", "function": "randlip", "d": 1, "n": 2,
                           "P": 6, "temperature": [12.5], "samples": 77, "seed": 4})";
  std::string help;
  const auto parsed = parse_arguments({"--config", cfg.string(), "--samples", "99"}, help);
  REQUIRE(parsed);
  CHECK(parsed->command == "approximate");
  CHECK(parsed->function == "randlip");
  CHECK(parsed->n == 2);
  CHECK(parsed->P == std::vector<std::size_t>{6});
  CHECK(parsed->temperature == std::vector<double>{12.5});
  CHECK(parsed->samples == 99);
  CHECK(parsed->seed == 4);

  std::ofstream(cfg) << R"({"command": "approximate", "bogus": 1})";
  CHECK_THROWS_AS(parse_arguments({"--config", cfg.string()}, help), UsageError);
  CHECK_FALSE(parse_arguments({"--help"}, help).has_value());
  CHECK(help.find("params-count") != std::string::npos);
}

TEST_CASE("option combinations") {
  RunConfig c;
  c.command = "approximate";
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.temperature = {10.0};
  CHECK_NOTHROW(c.validate());
  c.epsilon = 0.1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.temperature.clear();
  c.epsilon = 1.5;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.epsilon = 0.1;
  c.P = {4, 8};
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.command = "sweep";
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("csv and json layout") {
  ReportRow r;
  r.command = "approximate";
  r.function = "sinprod";
  r.n = 2;
  r.p_or_nx = 4;
  r.g = 16;
  r.temperature = 100.0;
  r.samples = 10;
  r.seed = 3;
  r.sup_err = 0.1;
  r.lp_err = 0.25;
  r.lp_stderr = 0.5;
  r.runtime_ms = 1.5;
  std::ostringstream csv;
  write_csv({r}, csv);
  CHECK(csv.str() ==
        std::string(kCsvHeader) +
            "\napproximate,sinprod,1,2,1,4,16,100,,2,10,3,0.10000000000000001,0.25,0,1.5\n");
  r.epsilon_target = 0.5;
  std::ostringstream json;
  write_json({r}, json);
  CHECK(json.str().find("\"lp_stderr\": 0.5") != std::string::npos);
  CHECK(json.str().find("\"epsilon_target\": 0.5") != std::string::npos);

  std::ostringstream verify;
  write_verify_csv({{"x.y", true, 1e-3, 1e-2, 2.0}}, verify);
  CHECK(verify.str().rfind("property,status,worst,tolerance,runtime_ms\nx.y,PASS,", 0) == 0);
}

TEST_CASE("plot scripts sit next to the report") {
  const fs::path report = scratch("plot.csv");
  CHECK_THROWS_AS(emit_plot_script(scratch("missing.csv"), PlotKind::error_vs_size),
                  std::invalid_argument);
  std::ofstream(report) << kCsvHeader << "\n";
  const fs::path script = emit_plot_script(report, PlotKind::error_vs_size);
  CHECK(script == scratch("plot.plot.py"));
  const std::string text = slurp(script);
  CHECK(text.find("matplotlib") != std::string::npos);
  CHECK(text.find("plot.csv") != std::string::npos);
}

TEST_CASE("exit codes and params-count") {
  CHECK(run_cli({"params-count", "--d", "1", "--n", "1", "--centers", "3"}).out == "19\n");
  CHECK(run_cli({"params-count", "--d", "2", "--n", "3", "--centers", "1"}).out == "31\n");
  CHECK(run_cli({"params-count", "--d", "1", "--n", "5", "--centers", "2"}).code == kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == kExitUsage);
  CHECK(run_cli({"approximate", "--function", "sinprod"}).code == kExitUsage);
  CHECK(run_cli({"approximate", "--function", "nosuch", "--temperature", "3"}).code == kExitUsage);
  const auto cap = run_cli({"approximate", "--function", "randlip", "--d", "1", "--n", "2", "--P",
                            "64", "--temperature", "5", "--path", "matrix", "--samples", "5"});
  CHECK(cap.code == kExitCap);
  CHECK(cap.err.find("4096") != std::string::npos);
  const auto huge = run_cli({"approximate", "--function", "randlip", "--d", "1", "--n", "3", "--P",
                             "64", "--temperature", "5", "--samples", "5"});
  CHECK(huge.code == kExitCap);
}

TEST_CASE("seeded runs write reports, curves and scripts") {
  const fs::path report = scratch("run.csv");
  const auto r = run_cli({"approximate", "--function", "randlip", "--d", "1", "--n", "1", "--P",
                          "16", "--temperature", "400", "--samples", "500", "--seed", "2", "--out",
                          report.string()});
  REQUIRE(r.code == kExitOk);
  const std::string text = slurp(report);
  CHECK(text.rfind(kCsvHeader, 0) == 0);
  CHECK(fs::exists(scratch("run.curve.csv")));
  CHECK(slurp(scratch("run.curve.csv")).rfind("x,f,approx\n", 0) == 0);
  CHECK(fs::exists(scratch("run.plot.py")));

  const auto sweep = run_cli({"sweep", "--function", "sinprod", "--d", "1", "--n", "2", "--P",
                              "2,4", "--temperature", "10,100", "--samples", "200"});
  REQUIRE(sweep.code == kExitOk);
  CHECK(std::count(sweep.out.begin(), sweep.out.end(), '\n') == 5);

  const auto demo =
      run_cli({"indicator-demo", "--function", "step1d", "--n", "2", "--samples", "400"});
  REQUIRE(demo.code == kExitOk);
  CHECK(demo.out.find("indicator-demo,step1d,1,2,") != std::string::npos);
}

TEST_CASE("auto grid points") {
  bool clamped = true;
  CHECK(auto_grid_points(0.1, 1.0, 1, 1024, clamped) == 32);
  CHECK_FALSE(clamped);
  CHECK(auto_grid_points(0.1 / (3.0 * 3.141592653589793 * 1.4142135623730951), 1.0, 2, kAutoGridCap,
                         clamped) == 128);
  CHECK(clamped);
}

TEST_CASE("documented command examples") {
  const auto c = run_cli({"approximate", "--function", "const:0.7", "--d", "1", "--n", "1", "--P",
                          "4", "--temperature", "50", "--samples", "2000"});
  REQUIRE(c.code == kExitOk);
  std::istringstream lines(c.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  std::vector<std::string> fields;
  for (std::size_t start = 0, comma; start <= row.size(); start = comma + 1) {
    comma = row.find(',', start);
    if (comma == std::string::npos) comma = row.size();
    fields.push_back(row.substr(start, comma - start));
  }
  REQUIRE(fields.size() == 16);
  CHECK(std::stod(fields[12]) <= 1e-12);

  const auto add = resolve_target("addpair", {std::nullopt, 2, 2, 1.0, 0});
  CHECK(add.pair(Matrix(2, 2), Matrix(2, 2)) == Matrix(2, 2));
  CHECK(*resolve_target("const:0", {}).lipschitz == 0.0);
}

TEST_CASE("sinprod Lipschitz constant from a dense gradient grid") {
  // The output repeats s = sin(pi x) cos(pi y) twice, so the Jacobian is (1, 1)^T grad s
  // and its operator norm is sqrt(2) |grad s|.
  const auto t = resolve_target("sinprod", {std::nullopt, 1, 2, 1.0, 0});
  const double h = 1e-6;
  double best = 0.0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      const double x = -1.0 + i / 200.0, y = -1.0 + j / 200.0;
      const double s = t.single(Matrix{{x, y}})(0, 0);
      const double gx = (t.single(Matrix{{x + h, y}})(0, 0) - s) / h;
      const double gy = (t.single(Matrix{{x, y + h}})(0, 0) - s) / h;
      best = std::max(best, std::sqrt(2.0) * std::hypot(gx, gy));
    }
  CHECK(best == doctest::Approx(*t.lipschitz).epsilon(1e-4));
}

TEST_CASE("sweep over P with a target epsilon") {
  const auto r =
      run_cli({"sweep", "--function", "sinprod", "--d", "1", "--n", "2", "--P", "4,8,16,32",
               "--epsilon", "0.1", "--samples", "2000", "--path", "oracle"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::vector<double> sup;
  while (std::getline(lines, line)) {
    std::size_t pos = 0;
    for (int k = 0; k < 12; ++k) pos = line.find(',', pos) + 1;
    sup.push_back(std::stod(line.substr(pos, line.find(',', pos) - pos)));
  }
  REQUIRE(sup.size() == 4);
  for (std::size_t i = 1; i < sup.size(); ++i) CHECK(sup[i] <= sup[i - 1] + 2.0 * sup.back());
}
