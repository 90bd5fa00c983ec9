#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "narz/errors.hpp"
#include "narz/experiment.hpp"
#include "narz/io.hpp"
#include "narz/thresholds.hpp"
#include "narz/toml_lite.hpp"

using namespace narz;
namespace fs = std::filesystem;

TEST_CASE("toml subset parses into the json shape") {
  const char* text = R"(
# experiment
kind = "custom"
seed = 42
resolution_scale = 1.5

[model]
variant = "nonlocal-arz"

[flux]
family = "pipes"
J = 2.0

[grid]
x_left = -10.0
x_right = 10.0
n = 500

[trace]
seeds = [-1.0, 0.5, 2.0]
comparison_tol = 1e-2

[solver]
limiter = true
)";
  nlohmann::json j = parse_toml_lite(text);
  CHECK(j["kind"] == "custom");
  CHECK(j["seed"] == 42);
  CHECK(j["resolution_scale"] == 1.5);
  CHECK(j["model"]["variant"] == "nonlocal-arz");
  CHECK(j["flux"]["J"] == 2.0);
  CHECK(j["grid"]["n"] == 500);
  CHECK(j["trace"]["seeds"].size() == 3);
  CHECK(j["trace"]["seeds"][1] == 0.5);
  CHECK(j["trace"]["comparison_tol"] == 1e-2);
  CHECK(j["solver"]["limiter"] == true);
}

TEST_CASE("toml subset rejects malformed input") {
  CHECK_THROWS_AS(parse_toml_lite("key value\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("[table\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("k = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("k = [1, 2\n"), ConfigError);
}

TEST_CASE("config round trip through json") {
  ExperimentConfig c = builtin_config("global-nonlocal");
  ExperimentConfig c2 = ExperimentConfig::from_json(c.to_json());
  CHECK(c2.kind == c.kind);
  CHECK(c2.variant == c.variant);
  CHECK(c2.J == c.J);
  CHECK(c2.grid.n == c.grid.n);
  CHECK(c2.solver.t_end == c.solver.t_end);
  CHECK(c2.preset == c.preset);
  CHECK(c2.preset_params["amplitude"] == c.preset_params["amplitude"]);
}

TEST_CASE("builtin configs are constructible") {
  for (const char* name : {"blowup-local", "global-nonlocal", "comparison-seeds",
                           "threshold-figure", "consistency"})
    CHECK_NOTHROW(builtin_config(name));
  CHECK_NOTHROW(builtin_config("max-principles-gaussian-bump-lwr"));
  CHECK_NOTHROW(builtin_config("max-principles-exp-rise-bump-nonlocal-arz"));
  CHECK_THROWS_AS(builtin_config("no-such-experiment"), ConfigError);
}

TEST_CASE("time-to-shock bound from the initial slope") {
  CHECK(blowup_time_bound(-0.5) == doctest::Approx(2.0));
  CHECK(blowup_time_bound(-1.0) == doctest::Approx(1.0));
  CHECK(blowup_time_bound(-1e-6) == doctest::Approx(1e6));
  CHECK_THROWS_AS(blowup_time_bound(0.1), InvalidParameter);
  CHECK_THROWS_AS(blowup_time_bound(0.0), InvalidParameter);
}

TEST_CASE("a small custom experiment writes the full artifact set") {
  ExperimentConfig c;
  c.kind = "custom";
  c.name = "tiny";
  c.out_dir = "test_out/tiny";
  c.variant = ModelVariant::NonlocalARZ;
  c.J = 1.0;
  c.grid = Grid(-58.0, 18.0, 900);
  c.preset = "exp-rise-bump";
  c.preset_params = {{"amplitude", 0.25}, {"rise_rate", 0.5}, {"fall_rate", 2.0},
                     {"rise_pos", -4.0},  {"fall_pos", 0.0},  {"psi_c0", 0.05}};
  c.solver.t_end = 1.0;
  c.solver.snapshot_every = 50;
  c.trace_seeds = {-4.0};

  ExperimentResult r = run_experiment(c);
  CHECK(r.ok);
  for (const char* f : {"initial.csv", "snapshots.csv", "run_report.json", "curve.csv",
                        "summary.json", "traces/trace_0.csv"})
    CHECK(fs::exists(fs::path(c.out_dir) / f));

  nlohmann::json summary = io::read_json(fs::path(c.out_dir) / "summary.json");
  CHECK(summary["schema_version"] == 1);
  CHECK(summary["assumptions"]["all_pass"] == true);
  CHECK(summary["classification"]["all_subcritical"] == true);
  CHECK(summary["run"]["outcome"] == "completed");
}

TEST_CASE("config files load in both formats") {
  fs::create_directories("test_out");
  {
    std::ofstream f("test_out/cfg.toml");
    f << "kind = \"custom\"\nname = \"from-toml\"\n[grid]\nx_left = -3.0\nx_right = 3.0\nn = "
         "32\n";
  }
  ExperimentConfig a = load_config("test_out/cfg.toml");
  CHECK(a.name == "from-toml");
  CHECK(a.grid.n == 32);

  {
    std::ofstream f("test_out/cfg.json");
    f << R"({"kind": "custom", "name": "from-json", "grid": {"x_left": -3, "x_right": 3, "n": 48}})";
  }
  ExperimentConfig b = load_config("test_out/cfg.json");
  CHECK(b.name == "from-json");
  CHECK(b.grid.n == 48);
}

TEST_CASE("runs are reproducible bit for bit from their config") {
  ExperimentConfig c = builtin_config("consistency");
  c.solver.t_end = 0.0;  // consistency kind steps manually
  c.consistency_steps = 30;

  auto run_to = [&](const std::string& dir) {
    ExperimentConfig cc = c;
    cc.out_dir = dir;
    run_experiment(cc);
    nlohmann::json j = io::read_json(fs::path(dir) / "summary.json");
    j.erase("config");  // differs only in out_dir
    return j.dump();
  };
  CHECK(run_to("test_out/repro_a") == run_to("test_out/repro_b"));
}

TEST_CASE("experiment fan-out over the worker pool") {
  ExperimentConfig a = builtin_config("consistency");
  a.consistency_steps = 10;
  a.out_dir = "test_out/pool_a";
  ExperimentConfig b = a;
  b.out_dir = "test_out/pool_b";
  auto results = run_experiments({a, b});
  REQUIRE(results.size() == 2);
  CHECK(results[0].ok);
  CHECK(results[1].ok);
  CHECK(fs::exists("test_out/pool_a/summary.json"));
  CHECK(fs::exists("test_out/pool_b/summary.json"));
}

TEST_CASE("threshold curve CSV round trip") {
  FluxModel m = FluxModel::pipes(2.0);
  ThresholdCurve eta = solve_threshold_ode(ThresholdCurve::Kind::Eta, m, 2.0);
  io::write_curve_csv("test_out/curve_rt.csv", eta, 2.0);
  ThresholdCurve back = io::load_curve_csv("test_out/curve_rt.csv");
  CHECK(back.kind == ThresholdCurve::Kind::Eta);
  CHECK(back.C_eta == doctest::Approx(2.0));
  REQUIRE(back.rho_star.has_value());
  CHECK(*back.rho_star == doctest::Approx(*eta.rho_star).epsilon(1e-12));
  for (double r : {0.05, 0.2, 0.4, 0.55})
    CHECK(back.eval(r) == doctest::Approx(eta.eval(r)).epsilon(1e-6));
  CHECK(back.eval(0.65) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("undersized domains are rejected up front") {
  ExperimentConfig c;
  c.kind = "custom";
  c.out_dir = "test_out/undersized";
  c.grid = Grid(-8.0, 8.0, 400);
  c.preset = "gaussian-bump";
  c.preset_params = {{"amplitude", 0.2}, {"center", 0.0}, {"width", 1.2}};
  c.solver.t_end = 20.0;  // support + t_end exceeds the box
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}
