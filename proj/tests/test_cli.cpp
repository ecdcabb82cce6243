#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "halfwave/cli.hpp"
#include "halfwave/errors.hpp"

using namespace halfwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "halfwave");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("halfwave_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json(const fs::path& path) { return Json::parse(slurp(path)); }

const std::vector<std::string> kSmallNlw = {"nlw", "--N", "64", "--L", "16", "--dt", "0.015625", "--T", "1"};

}  // namespace

TEST_CASE("config text parsing") {
  const auto m = parse_config_text("# comment\nN = 128\n\n  L=12.5  # trailing\ntimes = 1, 2, 4\n");
  CHECK(m.size() == 3);
  CHECK(m.at("N") == "128");
  CHECK(m.at("L") == "12.5");
  CHECK(m.at("times") == "1, 2, 4");
  CHECK_THROWS_AS(parse_config_text("N 128\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
}

TEST_CASE("config keys") {
  RunConfig c = RunConfig::defaults_for("evolve");
  CHECK(c.n == 512);
  c.set("N", "256");
  c.set("times", "1,2,3");
  c.set("p", "inf");
  CHECK(c.n == 256);
  CHECK(c.times.size() == 3);
  CHECK(std::isinf(c.p));
  CHECK_THROWS_AS(c.set("colour", "red"), ConfigError);
  CHECK_THROWS_AS(c.set("N", "many"), ConfigError);
  c.set("N", "100");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(RunConfig::defaults_for("nlw").to_json()["schema_version"] == RunConfig::kSchemaVersion);
}

TEST_CASE("usage errors exit with status 2") {
  const Outcome empty = invoke({});
  CHECK(empty.status == 2);
  CHECK(empty.err.find("usage") != std::string::npos);
  CHECK(invoke({"--help"}).status == 0);
  CHECK(invoke({"teleport"}).status == 2);
  CHECK(invoke({"knapp", "--N", "100"}).status == 2);
  CHECK(invoke({"knapp", "--bogus", "1"}).status == 2);
  CHECK(invoke({"knapp", "--config", "/nonexistent/halfwave.cfg"}).status == 2);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = scratch("override");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "N = 32\nL = 16\ndt = 0.25\nT = 1\n";
  const fs::path out = dir / "out";
  const Outcome r = invoke({"nlw", "--config", cfg.string(), "--N", "64", "--out", out.string()});
  REQUIRE(r.status == 0);
  const Json manifest = read_json(out / "nlw" / "manifest.json");
  CHECK(manifest["config"]["grid"]["N"] == 64);
  CHECK(manifest["config"]["grid"]["L"] == 16.0);
  CHECK(manifest["config"]["solver"]["dt"] == 0.25);
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["versions"].contains("fftw"));
}

TEST_CASE("knapp command reproduces the half-power growth") {
  const fs::path out = scratch("knapp");
  const Outcome r = invoke({"knapp", "--N", "512", "--L", "128", "--p", "1", "--out", out.string()});
  REQUIRE(r.status == 0);
  const Json result = read_json(out / "knapp" / "manifest.json")["result"];
  CHECK(result["slope"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(fs::exists(out / "knapp" / "knapp_p1.csv"));
}

TEST_CASE("nlw command conserves energy and reruns byte for byte") {
  const fs::path a = scratch("nlw_a");
  const fs::path b = scratch("nlw_b");
  auto args = kSmallNlw;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(invoke(args).status == 0);
  args.back() = b.string();
  REQUIRE(invoke(args).status == 0);

  const Json summary = read_json(a / "nlw" / "summary.json");
  CHECK(summary["energy_drift"].get<double>() < 1e-6);
  CHECK(summary["gronwall"]["certified"] == true);

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a / "nlw")) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / "nlw" / name), name);
    ++compared;
  }
  CHECK(compared >= 4);
}

TEST_CASE("output root falls back to the environment") {
  const fs::path root = scratch("env");
  ::setenv("HALFWAVE_OUTPUT_DIR", root.c_str(), 1);
  CHECK(default_output_dir() == root);
  const Outcome r = invoke(kSmallNlw);
  ::unsetenv("HALFWAVE_OUTPUT_DIR");
  REQUIRE(r.status == 0);
  CHECK(fs::exists(root / "nlw" / "manifest.json"));
  CHECK(default_output_dir() == fs::path("halfwave_out"));
}

TEST_CASE("numerical validation failures exit with status 3 and flag partial output") {
  const fs::path out = scratch("wrap");
  // The last time wraps the Knapp datum around the periodic box.
  const Outcome r =
      invoke({"knapp", "--N", "512", "--L", "128", "--times", "4,8,100", "--out", out.string()});
  CHECK(r.status == 3);
  CHECK_FALSE(r.err.empty());
  const Json manifest = read_json(out / "knapp" / "manifest.json");
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["result"]["partial"] == true);
}
