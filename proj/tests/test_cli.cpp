#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

// Runs the CLI with `args`, capturing stdout and stderr.
Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(BOHM2P_CLI_PATH) + " " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.output.append(buf, n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("bohm2p-cli-" + name + ".json");
  std::ofstream(path) << text;
  return path;
}

const char* kSmall = R"({
  "schema": "bohm2p/scenario/1",
  "name": "cli-small",
  "model": {"type": "oscillator_pair", "omega": 1.0, "a": 2.0},
  "sampler": {"n_samples": 60, "seed": 3, "burn_in": 300},
  "time_grid": {"t_start": 0.0, "t_end": 1.0, "n_samples_along_t": 3},
  "checks": [{"kind": "no_order_swaps"}],
  "property_checks": []
})";

}  // namespace

TEST(Cli, ScenariosListsBuiltins) {
  const Outcome o = run_cli("scenarios");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.output.find("gaussian-different-slits"), std::string::npos);
  EXPECT_NE(o.output.find("oscillator-pair"), std::string::npos);
  EXPECT_EQ(run_cli("scenarios --show plane-wave-grid").code, 0);
  EXPECT_EQ(run_cli("scenarios --show missing").code, 2);
}

TEST(Cli, CheckExitCodes) {
  const Outcome fast = run_cli("check --fast");
  EXPECT_EQ(fast.code, 0) << fast.output;
  EXPECT_NE(fast.output.find("PASS"), std::string::npos);
  const Outcome mutated = run_cli("check --fast --suite velocity-sum --mutate-velocity-sum");
  EXPECT_EQ(mutated.code, 1) << mutated.output;
  EXPECT_NE(mutated.output.find("FAIL"), std::string::npos);
  const Outcome unknown = run_cli("check --suite bogus");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.output.find("--suite"), std::string::npos);
}

TEST(Cli, EmptyPropertyCheckListPasses) {
  const auto cfg = write_config("empty-checks", kSmall);
  EXPECT_EQ(run_cli("check --config " + cfg.string()).code, 0);
}

TEST(Cli, RunWritesOutputs) {
  const auto cfg = write_config("run", kSmall);
  const auto out = std::filesystem::temp_directory_path() / "bohm2p-cli-run-out";
  std::filesystem::remove_all(out);
  const Outcome o = run_cli("run " + cfg.string() + " --out " + out.string() + " --threads 2");
  EXPECT_EQ(o.code, 0) << o.output;
  for (const char* f : {"trajectories.csv", "marginals.csv", "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  const Outcome s = run_cli("sample " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(s.code, 0) << s.output;
  EXPECT_TRUE(std::filesystem::exists(out / "samples.csv"));
}

TEST(Cli, ConfigErrorsExitTwoAndNameTheField) {
  std::string bad = kSmall;
  bad.replace(bad.find("\"a\": 2.0"), 8, "\"a\": \"far\"");
  const auto cfg = write_config("bad", bad);
  const Outcome o = run_cli("run " + cfg.string());
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("model.a"), std::string::npos) << o.output;
  EXPECT_EQ(run_cli("run /nonexistent/x.json").code, 2);
  EXPECT_EQ(run_cli("run").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST(Cli, FailingCheckExitsOne) {
  std::string failing = kSmall;
  failing.replace(failing.find("{\"kind\": \"no_order_swaps\"}"), 26,
                  R"({"kind": "constraint_residual", "max": 1e-300, "min_fraction": 1.0})");
  const auto cfg = write_config("failing", failing);
  const auto out = std::filesystem::temp_directory_path() / "bohm2p-cli-fail-out";
  const Outcome o = run_cli("run " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(o.code, 1) << o.output;
}
