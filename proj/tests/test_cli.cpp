#include <doctest.h>

#include "commands.hpp"
#include "config.hpp"

#include "gflow/error.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace gflow;
using namespace gflow::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gflow_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const int raw = std::system((std::string(GFLOW_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_CASE("configuration is parsed strictly") {
  const auto& cmd = find_command("cylinder-flow");
  const auto cfg = resolve(cmd, nullptr, "out");
  CHECK(num(cfg, "h0sq") == 0.5);
  CHECK(cfg["output"]["directory"] == "out");

  CHECK_THROWS_AS(resolve(cmd, Json::object(), "out"), ConfigError);
  CHECK_THROWS_AS(resolve(cmd, Json::parse(R"({"parameters":{"h0":1}})"), "out"), ConfigError);
  CHECK_THROWS_AS(resolve(cmd, Json::parse(R"({"extra":1})"), "out"), ConfigError);
  CHECK_THROWS_AS(resolve(cmd, Json::parse(R"({"command":"shoot"})"), "out"), ConfigError);
  CHECK_THROWS_AS(resolve(cmd, Json::parse(R"({"parameters":{"h_sign":1.5}})"), "out"), ConfigError);
  CHECK_THROWS_AS(resolve(cmd, Json::parse(R"({"tolerances":{"rtol":"tight"}})"), "out"),
                  ConfigError);
  const auto ok = resolve(cmd, Json::parse(R"({"parameters":{"h0sq":0.3},"tolerances":{"grid":4}})"),
                          "out");
  CHECK(num(ok, "h0sq") == 0.3);
  CHECK(ok["tolerances"]["grid"] == 4);
  CHECK_THROWS_AS(find_command("nope"), ConfigError);

  const ParamSpec p{"x", Kind::number, 0.0, ""};
  CHECK(parse_value(p, "1e-3", "x") == 1e-3);
  CHECK_THROWS_AS(parse_value(p, "inf", "x"), ConfigError);
  CHECK_THROWS_AS(parse_value(p, "1.0abc", "x"), ConfigError);
  const ParamSpec c{"e", Kind::text, "a", "", {"a", "b"}};
  CHECK_THROWS_AS(parse_value(c, "z", "e"), ConfigError);
}

TEST_CASE("config syntax errors report line and column") {
  const auto dir = scratch("syntax");
  std::ofstream(dir / "bad.json") << "{\n  \"command\": \"shoot\",\n  \"parameters\": {,}\n}\n";
  try {
    load_config_file((dir / "bad.json").string());
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.json:3:") != std::string::npos);
  }
}

TEST_CASE("commands return their artifacts") {
  auto cfg = resolve(find_command("cylinder-flow"), nullptr, "out");
  const auto r = run_command(cfg);
  REQUIRE(r.files.size() == 2);
  CHECK(r.files[0].first == "cylinder.csv");
  CHECK(r.files[0].second.rfind("t,lambda,h,beta,lambda_h2,u,lambda_h_beta,torsion_integral\n", 0) ==
        0);

  auto shoot = resolve(find_command("shoot"), nullptr, "out");
  const auto j = Json::parse(run_command(shoot).files[1].second);
  for (const char* k : {"r1", "r2", "r3", "r4"}) CHECK(j[k].is_number());
  CHECK(j["u_max"].get<double>() == doctest::Approx(2.27951).epsilon(1e-5));

  cfg["parameters"]["h0sq"] = -0.1;
  CHECK_THROWS_AS(run_command(cfg), InvalidInput);
}

TEST_CASE("binary: balanced run, exit codes, atomic output") {
  const auto dir = scratch("binary");
  REQUIRE(run("cylinder-flow --h0sq 0.5 --out " + (dir / "bal").string()) == 0);
  const auto csv = slurp(dir / "bal" / "cylinder.csv");
  const auto row = csv.find("\n1,");
  REQUIRE(row != std::string::npos);
  const double lambda = std::stod(csv.substr(csv.find(',', row + 1) + 1));
  CHECK(lambda == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(csv.find('\r') == std::string::npos);
  for (const auto& e : fs::directory_iterator(dir / "bal"))
    CHECK(e.path().string().find(".tmp") == std::string::npos);

  // Re-running the same configuration reproduces every byte.
  REQUIRE(run("cylinder-flow --h0sq 0.5 --out " + (dir / "bal2").string()) == 0);
  CHECK(slurp(dir / "bal2" / "cylinder.csv") == csv);
  CHECK(slurp(dir / "bal2" / "cylinder.json") == slurp(dir / "bal" / "cylinder.json"));

  std::ofstream(dir / "empty.json").close();
  CHECK(run("--config " + (dir / "empty.json").string() + " --out " + (dir / "e").string()) == 2);
  CHECK(!fs::exists(dir / "e"));
  CHECK(run("cylinder-flow --h0sq -1 --out " + (dir / "n").string()) == 2);
  CHECK(!fs::exists(dir / "n"));
  CHECK(run("shoot --r_switch abc") == 2);
  CHECK(run("cylinder-flow --dump-config") == 0);
}

TEST_CASE("binary: sweep writes one subdirectory per value") {
  const auto dir = scratch("sweep");
  REQUIRE(run("--out " + dir.string() + " --sweep h0sq=0.1,0.3,0.7 cylinder-flow") == 0);
  for (const char* v : {"h0sq=0.1", "h0sq=0.3", "h0sq=0.7"})
    CHECK(fs::exists(dir / v / "cylinder.csv"));
  CHECK(run("--out " + dir.string() + " --sweep nope=1 cylinder-flow") == 2);
}
