#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "bohm2p/errors.hpp"
#include "bohm2p/output.hpp"
#include "bohm2p/scenario.hpp"

using namespace bohm2p;
using nlohmann::json;

namespace {

json small_doc() {
  return json::parse(R"({
    "schema": "bohm2p/scenario/1",
    "name": "small",
    "model": {"type": "gaussian_slit", "sigma0": 1.0, "a": 6.0, "kx": 0.0, "ky": 1.0},
    "sampler": {"n_samples": 120, "seed": 5, "burn_in": 500, "chain_length": 40},
    "time_grid": {"t_start": 0.0, "t_end": 4.0, "n_samples_along_t": 5},
    "regions": [{"name": "both_above", "r1": {"x": [0.0, null]}, "r2": {"x": [0.0, null]}}],
    "histograms": {"coordinates": ["x1", "x1+x2"], "times": [0.0, 4.0], "bins": 12},
    "checks": [
      {"kind": "constraint_residual", "max": 1e-6, "min_fraction": 0.99},
      {"kind": "aborted_fraction", "max": 0.05}
    ]
  })");
}

// Field path of the ConfigError raised when parsing `doc`, or "" if none.
std::string error_field(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bohm2p-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(ScenarioParse, SmallDocument) {
  const ScenarioConfig cfg = parse_scenario(small_doc());
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.sampler.n_samples, 120u);
  EXPECT_EQ(cfg.sampler.thinning, 20u);
  EXPECT_EQ(cfg.time_grid.values(), (std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0}));
  ASSERT_EQ(cfg.regions.size(), 1u);
  EXPECT_TRUE(std::isinf(cfg.regions[0].r1.x.hi));
  EXPECT_EQ(cfg.checks.size(), 2u);
}

TEST(ScenarioParse, ErrorsNameTheField) {
  json d = small_doc();
  d["model"]["sigma0"] = -1.0;
  EXPECT_EQ(error_field(d), "model.sigma0");

  d = small_doc();
  d["schema"] = "other/2";
  EXPECT_EQ(error_field(d), "schema");

  d = small_doc();
  d["sampler"]["colour"] = 1;
  EXPECT_EQ(error_field(d), "sampler.colour");

  d = small_doc();
  d["sampler"]["n_samples"] = 0;
  EXPECT_EQ(error_field(d), "sampler.n_samples");

  d = small_doc();
  d["checks"][1]["max"] = "x";
  EXPECT_EQ(error_field(d), "checks[1].max");

  d = small_doc();
  d["histograms"]["times"] = json::array({0.5});
  EXPECT_EQ(error_field(d), "histograms.times[0]");

  d = small_doc();
  d["model"]["type"] = "spherical";
  EXPECT_EQ(error_field(d), "model.type");

  d = small_doc();
  d["time_grid"]["t_end"] = -1.0;
  EXPECT_FALSE(error_field(d).empty());

  EXPECT_THROW(parse_scenario_text("{not json"), ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(ScenarioParse, InitialPointsAndGrid) {
  json d = small_doc();
  d["model"] = {{"type", "plane_wave_pair"}, {"kx", 1.0}, {"ky", 1.0}};
  d.erase("histograms");
  d["checks"] = json::array({{{"kind", "coordinate_constancy"}, {"max", 1e-9}}});
  d["initial"] = {{"mode", "grid"},
                  {"x1", {{"min", -1.0}, {"max", 1.0}, {"n", 3}}},
                  {"x2", {{"min", 0.1}, {"max", 0.3}, {"n", 2}}}};
  const ScenarioConfig grid = parse_scenario(d);
  EXPECT_EQ(grid.initial.points.size(), 6u);

  d["initial"] = {{"mode", "points"}, {"points", json::array({{0.1, 0.0, 0.2, 0.0}})}};
  const ScenarioConfig pts = parse_scenario(d);
  ASSERT_EQ(pts.initial.points.size(), 1u);
  EXPECT_EQ(pts.initial.points[0].r2[0], 0.2);

  d["initial"]["points"] = json::array({{0.1, 0.0, 0.2}});
  EXPECT_EQ(error_field(d), "initial.points[0]");
}

TEST(ScenarioParse, BuiltinsParse) {
  ASSERT_GE(builtin_scenarios().size(), 4u);
  for (const BuiltinScenario& b : builtin_scenarios()) {
    const ScenarioConfig cfg = parse_scenario_text(b.json);
    EXPECT_EQ(cfg.name, b.name);
    EXPECT_EQ(find_builtin(b.name), &b);
  }
  EXPECT_EQ(find_builtin("nope"), nullptr);
}

TEST(ScenarioRun, SmallRunPassesAndWritesFiles) {
  const auto dir = fresh_dir("small");
  RunOptions opts;
  opts.out_dir = dir;
  opts.threads = 1;
  const RunResult r = run_scenario(parse_scenario(small_doc()), opts);
  EXPECT_TRUE(r.all_passed) << r.report.dump(2);
  EXPECT_EQ(r.report["diagnostics"]["n_pairs"], 120);

  const std::string traj = slurp(dir / "trajectories.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')), "pair_id,t,x1,y1,x2,y2,status");
  // Header plus 5 grid times per pair.
  EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 1 + 120 * 5);
  const std::string marg = slurp(dir / "marginals.csv");
  EXPECT_EQ(marg.rfind("bin_low,bin_high,count,quantum_density", 0), 0u);
  EXPECT_EQ(std::count(marg.begin(), marg.end(), '\n'), 1 + 2 * 2 * 12);
  const json report = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["all_passed"], true);
  EXPECT_TRUE(std::filesystem::exists(dir / "timings.json"));
}

TEST(ScenarioRun, OutputsIdenticalAcrossThreadCounts) {
  const ScenarioConfig cfg = parse_scenario(small_doc());
  RunOptions a;
  a.out_dir = fresh_dir("t1");
  a.threads = 1;
  RunOptions b;
  b.out_dir = fresh_dir("t3");
  b.threads = 3;
  run_scenario(cfg, a);
  run_scenario(cfg, b);
  for (const char* f : {"trajectories.csv", "marginals.csv", "report.json"}) {
    EXPECT_EQ(slurp(*a.out_dir / f), slurp(*b.out_dir / f)) << f;
  }
}

TEST(ScenarioRun, SeedOverrideChangesSamples) {
  const ScenarioConfig cfg = parse_scenario(small_doc());
  RunOptions a;
  a.write_files = false;
  RunOptions b = a;
  b.seed = 77;
  EXPECT_NE(run_sampler(cfg, a).report.dump(), run_sampler(cfg, b).report.dump());
}

TEST(Output, FormatDoubleRoundTrips) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 5e-324,
                   std::numeric_limits<double>::max()}) {
    EXPECT_EQ(std::strtod(output::format_double(v).c_str(), nullptr), v) << output::format_double(v);
  }
  EXPECT_EQ(output::format_double(2.0), "2");
  EXPECT_EQ(output::format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(output::format_double(-std::numeric_limits<double>::infinity()), "-inf");
}
