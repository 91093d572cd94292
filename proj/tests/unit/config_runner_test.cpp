#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degpar/config.hpp"
#include "degpar/runner.hpp"
#include "degpar/weights.hpp"

using namespace degpar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("degpar_test_" + std::to_string(std::rand()) +
            std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_sub(const std::string& sub, const std::string& cfg_path,
            const fs::path& out, std::string* log_text = nullptr) {
  RunOptions opts;
  opts.subcommand = sub;
  opts.config_path = cfg_path;
  opts.out_override = out.string();
  std::ostringstream log;
  const int rc = run(opts, log);
  if (log_text) *log_text = log.str();
  return rc;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults from empty text") {
    const auto cfg = parse_config_text("");
    CHECK(cfg.n == 201);
    CHECK(cfg.nt == 400);
    CHECK(cfg.K == 0.5);
    CHECK(cfg.form == Form::divergence);
    CHECK(cfg.c2.automatic);
    CHECK(cfg.epsilons == std::vector<double>{1e-6});
  }

  SUBCASE("full document round-trips into typed fields") {
    const auto cfg = parse_config_text(R"(
# experiment
[model]
x0 = 0.3
K = 1.5
form = "nondivergence"

[discretization]
n = 401
nt = 200
grading = 2.0
T = 0.5

[weights]
c1 = 2.5
c2 = "auto"
R = 0.7
s_min = 1.0
s_max = 100.0
s_count = 5

[carleman]
ensemble = 7
seed = 99
omega = [0.25, 0.45]

[control]
omega = [0.6, 0.8]
epsilon = [0.001, 1e-6]

[output]
dir = "results"
)");
    CHECK(cfg.x0 == 0.3);
    CHECK(cfg.K == 1.5);
    CHECK(cfg.form == Form::nondivergence);
    CHECK(cfg.n == 401);
    CHECK(cfg.grading == 2.0);
    CHECK_FALSE(cfg.c1.automatic);
    CHECK(cfg.c1.value == 2.5);
    CHECK(cfg.c2.automatic);
    CHECK(cfg.R == 0.7);
    CHECK(cfg.ensemble == 7);
    CHECK(cfg.seed == 99);
    REQUIRE(cfg.carleman_omega.has_value());
    CHECK(cfg.carleman_omega->lo == 0.25);
    CHECK(cfg.omega.hi == 0.8);
    CHECK(cfg.epsilons.size() == 2);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.s_grid().size() == 5);
    CHECK(cfg.s_grid().front() == doctest::Approx(1.0));
    CHECK(cfg.s_grid().back() == doctest::Approx(100.0));
  }

  SUBCASE("diagnostics carry line numbers") {
    try {
      parse_config_text("[model]\nx0 = 0.5\nbogus_key = 1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_config_text("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nform = \"weird\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nx0 = \"unterminated\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nx0 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nx0 = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[control]\nomega = [0.6, 0.4]\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nK = 0.5\nK = 0.6\n"), ConfigError);
  }

  SUBCASE("auto constants resolve to the admissibility defaults") {
    const auto cfg = parse_config_text("");
    const auto rc = resolve_constants(cfg);
    const auto model = cfg.model();
    CHECK(rc.c2 == doctest::Approx(1.5 * min_c2(model)).epsilon(1e-15));
    CHECK(rc.d2 == doctest::Approx(1.5 * min_d2(model, 1.0)).epsilon(1e-15));
    CHECK(rc.c1 == 1.0);
    CHECK(rc.provenance.at("c2") == "auto");

    const auto pinned = parse_config_text("[weights]\nc2 = 0.9\n");
    CHECK(resolve_constants(pinned).c2 == 0.9);
    CHECK(resolve_constants(pinned).provenance.at("c2") == "fixed");
  }
}

TEST_CASE("runner exit codes") {
  TempDir tmp;
  const auto cfg_path = (tmp.path / "cfg.toml").string();

  SUBCASE("missing config file") {
    std::string log;
    CHECK(run_sub("classify", (tmp.path / "absent.toml").string(),
                  tmp.path / "out", &log) == exit_config_error);
    CHECK(log.find("config error") != std::string::npos);
  }

  SUBCASE("malformed config") {
    std::ofstream(cfg_path) << "[model]\nK = \n";
    CHECK(run_sub("classify", cfg_path, tmp.path / "out") == exit_config_error);
  }

  SUBCASE("theory refusal for K >= 2") {
    std::ofstream(cfg_path) << "[model]\nK = 2.5\n";
    std::string log;
    CHECK(run_sub("weights", cfg_path, tmp.path / "out", &log) ==
          exit_theory_refusal);
    CHECK(log.find("refused") != std::string::npos);
  }

  SUBCASE("unknown subcommand") {
    CHECK(run_sub("frobnicate", "", tmp.path / "out") == exit_config_error);
  }
}

TEST_CASE("classify artifacts") {
  TempDir tmp;
  CHECK(run_sub("classify", "", tmp.path / "out") == exit_ok);
  const auto csv = slurp(tmp.path / "out" / "classify.csv");
  CHECK(csv.find("weak") != std::string::npos);
  CHECK(csv.find("theta,0.5") != std::string::npos);
  const auto summary = slurp(tmp.path / "out" / "summary.json");
  CHECK(summary.find("\"provenance\"") != std::string::npos);
  CHECK(summary.find("auto") != std::string::npos);
}

TEST_CASE("weights artifacts and determinism") {
  TempDir tmp;
  std::ofstream(tmp.path / "cfg.toml")
      << "[discretization]\nn = 64\nnt = 40\n[carleman]\nensemble = 2\nseed = "
         "5\n[weights]\ns_count = 3\ns_min = 10\ns_max = 100\n";
  const auto cfg = (tmp.path / "cfg.toml").string();

  CHECK(run_sub("weights", cfg, tmp.path / "w1") == exit_ok);
  CHECK(fs::exists(tmp.path / "w1" / "weights.csv"));
  CHECK(fs::exists(tmp.path / "w1" / "theta.csv"));
  CHECK(fs::exists(tmp.path / "w1" / "grid.csv"));

  CHECK(run_sub("carleman-scan", cfg, tmp.path / "s1") == exit_ok);
  CHECK(run_sub("carleman-scan", cfg, tmp.path / "s2") == exit_ok);
  CHECK(slurp(tmp.path / "s1" / "carleman.csv") ==
        slurp(tmp.path / "s2" / "carleman.csv"));
  CHECK(slurp(tmp.path / "s1" / "summary.json") ==
        slurp(tmp.path / "s2" / "summary.json"));
}

TEST_CASE("solve artifacts satisfy the energy contract") {
  TempDir tmp;
  std::ofstream(tmp.path / "cfg.toml") << "[discretization]\nn = 64\nnt = 50\n";
  CHECK(run_sub("solve", (tmp.path / "cfg.toml").string(), tmp.path / "out") ==
        exit_ok);
  const auto csv = slurp(tmp.path / "out" / "solve.csv");
  CHECK(csv.rfind("t,x,u", 0) == 0);
  const auto summary = slurp(tmp.path / "out" / "summary.json");
  CHECK(summary.find("\"pass\": true") != std::string::npos);
}
