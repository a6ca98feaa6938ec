#include "doctest.h"

#include "gmbe/cli.hpp"
#include "gmbe/io.hpp"
#include "gmbe/oracle.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gmbe;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gmbe");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "gmbe_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen writes a model and a sidecar") {
  const auto path = (scratch() / "grid.uai").string();
  REQUIRE(cli({"gen", "--model", "ising-grid", "--rows", "10", "--cols", "10", "--t", "1.0", "--seed",
               "7", "-o", path})
              .code == 0);
  const FactorGraph g = parse_uai(slurp(path));
  CHECK(g.num_vars() == 100);
  CHECK(g.num_factors() == 280);
  const json side = json::parse(slurp(path + ".json"));
  CHECK(side["seed"] == 7);
  CHECK(side.contains("git"));
  const std::string first = slurp(path);
  REQUIRE(cli({"gen", "--model", "ising-grid", "--rows", "10", "--cols", "10", "--t", "1.0", "--seed",
               "7", "-o", path})
              .code == 0);
  CHECK(slurp(path) == first);

  const Run flat = cli({"gen", "--model", "forney-3reg", "--factors", "4", "--t", "0", "--seed", "0"});
  CHECK(flat.code == 0);
  const FactorGraph f = parse_uai(flat.out);
  for (const Factor& fac : f.factors()) CHECK((fac.log_abs() == 0.0).all());
}

TEST_CASE("bound and verify agree") {
  const auto path = (scratch() / "small.uai").string();
  REQUIRE(cli({"gen", "--model", "random-forney", "--factors", "6", "--vars", "11", "--seed", "3",
               "-o", path})
              .code == 0);
  const double z = brute_z(parse_uai(slurp(path))).log_abs;
  const json be = json::parse(cli({"bound", path, "--method", "be"}).out);
  CHECK(be["log_bound"].get<double>() == doctest::Approx(z).epsilon(1e-12));
  const json wide = json::parse(cli({"bound", path, "--method", "wmbe", "--ibound", "99"}).out);
  CHECK(wide["log_bound"].get<double>() == doctest::Approx(z).epsilon(1e-12));

  const json wg = json::parse(
      cli({"bound", path, "--method", "wmbe-wg", "--ibound", "5", "--iters", "20", "--trace"}).out);
  const auto trace = wg["trace"].get<std::vector<double>>();
  CHECK(trace.size() == 21);
  for (std::size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] <= trace[t - 1]);

  const Run v = cli({"verify", path, "--methods", "be,mbe,wmbe,wmbe-g", "--ibound", "5", "--lower",
                     "--iters", "10"});
  CHECK(v.code == 0);
  const json report = json::parse(v.out);
  CHECK(report["pass"] == true);
  CHECK(report["results"].size() == 5);
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"bound"}).code == 1);
  CHECK(cli({"bound", "x.uai", "--method", "nope"}).code == 1);
  CHECK(cli({"bound", (scratch() / "missing.uai").string()}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  const auto path = (scratch() / "grid3.uai").string();
  REQUIRE(cli({"gen", "--model", "ising-forney", "--rows", "4", "--cols", "4", "-o", path}).code == 0);
  const Run small = cli({"bound", path, "--ibound", "2"});
  CHECK(small.code == 2);
  CHECK(small.err.find("IboundTooSmall") != std::string::npos);
  CHECK(cli({"sweep", "--t", "1:0:-1"}).code == 1);
}

TEST_CASE("sweep rows and determinism") {
  const std::vector<std::string> args = {"sweep",  "--family", "symmetric", "--factors", "6",
                                         "--t",    "0.5:1.0:0.5", "--trials", "3",
                                         "--methods", "mbe,wmbe,wmbe-theta,wmbe-g", "--iters", "5",
                                         "--ibound", "3"};
  const Run a = cli(args);
  REQUIRE(a.code == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 1 + 2 * 3 * 4);
  setenv("GMBE_THREADS", "1", 1);
  const Run b = cli(args);
  unsetenv("GMBE_THREADS");
  CHECK(a.out == b.out);
  // log(Z_UB / Z_MBE) is zero on the MBE rows
  std::istringstream lines(a.out);
  std::string line;
  while (std::getline(lines, line))
    if (line.find(",mbe,") != std::string::npos) CHECK(line.find("log(Z_UB/Z_MBE),0,") != std::string::npos);
}
