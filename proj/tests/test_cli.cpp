#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {
const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "halfline_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("cd '") + workdir().string() + "' && '" + HALFLINE_CLI + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }
}  // namespace

TEST_CASE("scatter on the free preset") {
  REQUIRE(run("scatter --preset free --out free_scatter") == 0);
  for (const char* f : {"scattering.json", "potential.json", "kernel.csv", "kernel.json", "config.json", "summary.txt"})
    CHECK(fs::exists(workdir() / "free_scatter" / f));
  const auto j = nlohmann::json::parse(slurp(workdir() / "free_scatter" / "scattering.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["bound_states"].empty());
  CHECK_FALSE(fs::exists(workdir() / "free_scatter.staging"));
}

TEST_CASE("bad input fails before any output") {
  write(workdir() / "broken.json", "{\"potential\": ");
  CHECK(run("scatter --config broken.json --out broken") == 2);
  CHECK_FALSE(fs::exists(workdir() / "broken"));
  write(workdir() / "unknown.json", R"({"potential": "free", "colour": "blue"})");
  CHECK(run("scatter --config unknown.json --out unknown") == 2);
  CHECK_FALSE(fs::exists(workdir() / "unknown"));
  CHECK(run("scatter --preset nowhere --out nowhere") == 2);
  CHECK_FALSE(fs::exists(workdir() / "nowhere"));
  CHECK(run("scatter --config absent.json --out absent") != 0);
  CHECK_FALSE(fs::exists(workdir() / "absent"));
  // the resonant well is rejected by the pipeline
  write(workdir() / "resonant.json", R"({"potential": {"kind": "square_well", "params": [2.4674011002723395, 1]}})");
  CHECK(run("scatter --config resonant.json --out resonant") == 3);
  CHECK_FALSE(fs::exists(workdir() / "resonant"));
}

TEST_CASE("a failed property still writes its outputs") {
  write(workdir() / "tight.json", R"({"potential": "shallow-well", "mode": "kernel", "evolve_times": [1],
                                     "tolerances": {"crosscheck": 1e-12}})");
  CHECK(run("evolve --config tight.json --out tight") == 1);
  CHECK(fs::exists(workdir() / "tight" / "kernel_t1.csv"));
  CHECK(slurp(workdir() / "tight" / "summary.txt").find("[FAIL]") != std::string::npos);
}

TEST_CASE("decay runs are deterministic and recover the free exponent") {
  REQUIRE(run("decay --preset free --out decay_a") == 0);
  REQUIRE(run("decay --preset free --out decay_b") == 0);
  CHECK(slurp(workdir() / "decay_a" / "decay.csv") == slurp(workdir() / "decay_b" / "decay.csv"));
  CHECK(slurp(workdir() / "decay_a" / "decay.csv").rfind("label,p,projected,t,norm,sobolev_norm\n", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(workdir() / "decay_a" / "decay.json"));
  bool seen = false;
  for (const auto& r : j["reports"])
    if (r["p"] == 1.0 && r["projected"] == true) {
      seen = true;
      CHECK(r["fit"]["alpha"].get<double>() >= 0.45);
      CHECK(r["fit"]["alpha"].get<double>() <= 0.55);
    }
  CHECK(seen);

  // runs into an existing directory add their files next to the earlier ones
  REQUIRE(run("scatter --preset free --out decay_a") == 0);
  CHECK(fs::exists(workdir() / "decay_a" / "decay.csv"));
  CHECK(fs::exists(workdir() / "decay_a" / "scattering.json"));
  CHECK(slurp(workdir() / "decay_a" / "summary.txt").rfind("scatter:", 0) == 0);
}

TEST_CASE("deep-well evolve passes the kernel/oracle cross-check") {
  REQUIRE(run("evolve --preset deep-well --mode both --out deep") == 0);
  const auto j = nlohmann::json::parse(slurp(workdir() / "deep" / "crosscheck.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(fs::exists(workdir() / "deep" / "kernel_t1.csv"));
  CHECK(fs::exists(workdir() / "deep" / "oracle_t8.csv"));
  CHECK(slurp(workdir() / "deep" / "kernel_t1.csv").rfind("x,re,im\n", 0) == 0);
}
