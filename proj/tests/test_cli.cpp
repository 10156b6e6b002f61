#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "freqinv_cli_tests";

int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = std::string("\"") + FREQINV_CLI + "\" " + args + " > \"" +
                          (kWork / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario(const std::string& name) {
  return "\"" + (fs::path(FREQINV_SCENARIO_DIR) / name).string() + "\"";
}

}  // namespace

TEST_CASE("invalid scenario exits with code 2") {
  fs::create_directories(kWork);
  const fs::path bad = kWork / "bad.json";
  std::ofstream(bad) << R"({"inclusions": [{"center": [0, 0, -1.5], "side": 0.5, "contrast": 0.5}]})";
  CHECK(run("pipeline --scenario \"" + bad.string() + "\" --out \"" +
            (kWork / "bad").string() + "\"") == 2);
  CHECK(run("forward --scenario \"" + (kWork / "missing.json").string() + "\"") == 2);
}

TEST_CASE("usage errors are rejected") {
  CHECK(run("") != 0);
  CHECK(run("pipeline --scenario " + scenario("case1.json") + " --q-coupling bogus") != 0);
}

TEST_CASE("verify") {
  CHECK(run("verify --level quick") == 0);
  CHECK(run("verify --level quick --tolerance 1e-2") == 1);
}

TEST_CASE("coarse background pipeline writes its outputs") {
  const fs::path out = kWork / "background";
  fs::remove_all(out);
  REQUIRE(run("pipeline --scenario " + scenario("background.json") +
              " --grid-step 0.5 --sweeps 1 --inner 1 --noise 0 --out \"" + out.string() +
              "\"") == 0);
  for (const char* f : {"traces.csv", "traces.bin", "u_kbar.vtk", "c_comp.vtk",
                        "metrics.json", "iterations.jsonl"})
    CHECK(fs::exists(out / f));
  std::ifstream in(out / "metrics.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["iterations"].size() == 1);
  CHECK(j["summary"]["max_c"].get<double>() == doctest::Approx(1.0));

  const fs::path again = kWork / "background_invert";
  fs::remove_all(again);
  CHECK(run("invert --scenario " + scenario("background.json") +
            " --grid-step 0.5 --sweeps 1 --inner 1 --noise 0 --traces \"" +
            (out / "traces.bin").string() + "\" --out \"" + again.string() + "\"") == 0);
  CHECK(fs::exists(again / "metrics.json"));
}
