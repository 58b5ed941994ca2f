// bohm2p: command-line front end for the two-particle trajectory simulator.
//
// Exit codes: 0 when every configured check passes, 1 on a failed check or a
// runtime error, 2 on a command-line or configuration error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bohm2p/checks.hpp"
#include "bohm2p/errors.hpp"
#include "bohm2p/output.hpp"
#include "bohm2p/scenario.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::string describe(const nlohmann::json& check) {
  std::string line = check.value("passed", false) ? "PASS " : "FAIL ";
  line += check.value("name", std::string("?"));
  auto field = [&](const char* key) {
    if (!check.contains(key)) return;
    const auto& v = check.at(key);
    line += std::string(" ") + key + "=";
    line += v.is_number() ? bohm2p::output::format_double(v.get<double>()) : v.dump();
  };
  field("measured");
  field("threshold");
  if (check.contains("detail")) line += " (" + check.at("detail").get<std::string>() + ")";
  return line;
}

void print_checks(const nlohmann::json& report) {
  for (const auto& c : report.at("checks")) std::cout << describe(c) << '\n';
  const std::size_t n = report.at("checks").size();
  std::size_t passed = 0;
  for (const auto& c : report.at("checks")) passed += c.value("passed", false) ? 1 : 0;
  std::cout << passed << "/" << n << " checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-particle Bohmian trajectory simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Sample, propagate, compute statistics and run checks");
  run->add_option("config", config_path, "Scenario JSON file or built-in scenario name")
      ->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--seed", seed, "Sampler seed (overrides sampler.seed)");
  run->add_option("--threads", threads, "Worker threads (default: $BOHM2P_THREADS or all cores)");

  bool fast = false;
  bool mutate = false;
  std::vector<std::string> suites;
  std::string check_config;
  auto* check = app.add_subcommand("check", "Run the property suites on the default models");
  check->add_flag("--fast", fast, "100 points per model instead of 1000");
  check->add_option("--suite", suites, "Suite to run (repeatable; default: all)");
  check->add_option("--config", check_config,
                    "Scenario JSON whose property_checks list selects the suites");
  check->add_option("--seed", seed, "Seed for the random test points");
  check->add_option("--out", out_dir, "Directory for check_report.json");
  check->add_flag("--mutate-velocity-sum", mutate,
                  "Flip the sign of the interference term in the closed-form velocity sum");

  std::string show;
  auto* scenarios = app.add_subcommand("scenarios", "List the built-in scenarios");
  scenarios->add_option("--show", show, "Print the JSON of one built-in scenario");

  auto* sample = app.add_subcommand("sample", "Draw initial configurations only");
  sample->add_option("config", config_path, "Scenario JSON file or built-in scenario name")
      ->required();
  sample->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  sample->add_option("--seed", seed, "Sampler seed (overrides sampler.seed)");
  sample->add_option("--threads", threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    bohm2p::RunOptions options;
    if (out_dir) options.out_dir = std::filesystem::path(*out_dir);
    options.seed = seed;
    options.threads = threads;

    if (*run) {
      const bohm2p::ScenarioConfig cfg = bohm2p::load_scenario(config_path);
      const bohm2p::RunResult result = bohm2p::run_scenario(cfg, options);
      print_checks(result.report);
      std::cout << "outputs written to " << result.output_dir.string() << '\n';
      return result.all_passed ? EXIT_SUCCESS : kExitFailure;
    }

    if (*check) {
      bohm2p::CheckOptions opts;
      opts.fast = fast;
      opts.mutate_velocity_sum_sign = mutate;
      if (seed) opts.seed = *seed;
      if (!check_config.empty()) {
        const bohm2p::ScenarioConfig cfg = bohm2p::load_scenario(check_config);
        opts.suites = cfg.property_checks_given ? cfg.property_checks : bohm2p::all_check_suites();
      } else {
        opts.suites = suites.empty() ? bohm2p::all_check_suites() : suites;
      }
      const auto known = bohm2p::all_check_suites();
      for (const std::string& s : opts.suites) {
        if (std::find(known.begin(), known.end(), s) == known.end()) {
          throw bohm2p::ConfigError("--suite", "unknown suite '" + s + "'");
        }
      }
      const bohm2p::RunResult result = bohm2p::run_checks(opts);
      print_checks(result.report);
      if (out_dir) {
        bohm2p::output::write_file(std::filesystem::path(*out_dir) / "check_report.json",
                                   [&](std::ostream& os) {
                                     bohm2p::output::write_json(os, result.report);
                                   });
      }
      return result.all_passed ? EXIT_SUCCESS : kExitFailure;
    }

    if (*scenarios) {
      if (!show.empty()) {
        const bohm2p::BuiltinScenario* b = bohm2p::find_builtin(show);
        if (b == nullptr) throw bohm2p::ConfigError("--show", "no built-in scenario '" + show + "'");
        std::cout << b->json << '\n';
        return EXIT_SUCCESS;
      }
      for (const auto& b : bohm2p::builtin_scenarios()) {
        std::cout << b.name << "\t" << b.summary << '\n';
      }
      return EXIT_SUCCESS;
    }

    if (*sample) {
      const bohm2p::ScenarioConfig cfg = bohm2p::load_scenario(config_path);
      const bohm2p::RunResult result = bohm2p::run_sampler(cfg, options);
      std::cout << result.report.dump(2) << '\n';
      std::cout << "samples written to " << (result.output_dir / "samples.csv").string() << '\n';
      return EXIT_SUCCESS;
    }
  } catch (const bohm2p::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bohm2p::Error& e) {
    std::cerr << "error (" << bohm2p::to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
