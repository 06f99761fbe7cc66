// betafree: run the corruption-level-free meta estimator from the command
// line.
//
//   betafree simulate --config runs.yaml --out results.csv [--jobs N] [--wallclock]
//   betafree verify lemma2|lemma3|lemma_lb|two_param|mean_var
//   betafree grid --beta-max 0.4 --theta 1.1 --epsilon 0.01 --f identity
//
// Exit status: 0 success, 1 assertion or bound failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "betafree/beta_grid.hpp"
#include "betafree/errors.hpp"
#include "betafree/harness.hpp"
#include "betafree/verify_suites.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Statistical target for simulate: at most 5% of a scenario's trials may
// exceed their bound.
constexpr double kMaxViolationRate = 0.05;

struct SimulateArgs {
  std::string config;
  std::string out;
  unsigned jobs = 1;
  bool wallclock = false;
};

struct VerifyArgs {
  std::string suite;
  std::size_t instances = 10'000;
  std::uint64_t seed_base = betafree::SuiteOptions{}.seed_base;
};

struct GridArgs {
  double beta_max = 0.4;
  double theta = 1.1;
  double epsilon = 0.01;
  std::string f = "identity";
  double sigma = 1.0;
  std::size_t n = 10'000;
};

int cmd_simulate(const SimulateArgs& args) {
  betafree::RunConfig config;
  try {
    config = betafree::load_config(args.config);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  std::filesystem::path out = args.out.empty() ? config.output : std::filesystem::path(args.out);
  if (out.empty()) {
    fmt::print(stderr, "error: no output path (pass --out or set 'output' in the config)\n");
    return kUsage;
  }
  std::ofstream file(out);
  if (!file) {
    fmt::print(stderr, "error: cannot write '{}'\n", out.string());
    return kUsage;
  }
  betafree::SimulationResult result;
  try {
    result = betafree::run_simulation(config, {args.jobs, args.wallclock});
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: simulation failed: {}\n", e.what());
    return kFailure;
  }
  betafree::write_csv(file, result.records);
  file.close();
  if (!file) {
    fmt::print(stderr, "error: failed while writing '{}'\n", out.string());
    return kUsage;
  }
  const auto summary = betafree::summarize(result.records, result.invocations);
  betafree::print_summary(std::cout, summary);
  fmt::print("wrote {} trials to {}\n", result.records.size(), out.string());

  bool ok = true;
  for (const auto& s : summary) {
    if (static_cast<double>(s.violations) > kMaxViolationRate * static_cast<double>(s.trials)) {
      fmt::print(stderr, "scenario {}: {} of {} trials exceed the bound (> {:.0f}%)\n",
                 s.scenario_id, s.violations, s.trials, 100 * kMaxViolationRate);
      ok = false;
    }
  }
  return ok ? kOk : kFailure;
}

int cmd_verify(const VerifyArgs& args) {
  const auto suite = betafree::suite_from_string(args.suite);
  if (!suite) {
    fmt::print(stderr, "error: unknown suite '{}' (lemma2, lemma3, lemma_lb, two_param, mean_var)\n",
               args.suite);
    return kUsage;
  }
  const auto report = betafree::run_suite(*suite, {args.instances, args.seed_base});
  for (const auto& line : report.lines) fmt::print("{}\n", line);
  if (report.failing_seed) {
    fmt::print("replay: betafree verify {} --instances 1 --seed-base {}\n", args.suite,
               *report.failing_seed);
  }
  fmt::print("{}: {}\n", args.suite, report.passed ? "PASS" : "FAIL");
  return report.passed ? kOk : kFailure;
}

int cmd_grid(const GridArgs& args) {
  try {
    const auto f = args.f == "trimmed-mean" ? betafree::ErrorModel::trimmed_mean(args.sigma, args.n)
                                            : betafree::ErrorModel::by_name(args.f);
    const auto grid = betafree::build_beta_grid(args.beta_max, args.theta, args.epsilon, f);
    for (double b : grid.betas) fmt::print("{:.17g}\n", b);
  } catch (const betafree::ParameterError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corruption-level-free robust estimation: selectors, simulations and checks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the configured trials and write a CSV");
  simulate->add_option("--config", sim.config, "Experiment file (YAML)")->required();
  simulate->add_option("--out", sim.out, "Output CSV path");
  simulate->add_option("--jobs", sim.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
  simulate->add_flag("--wallclock", sim.wallclock, "Record per-trial wall time (breaks byte-identical reruns)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run a property or negative-result suite");
  verify->add_option("suite", ver.suite, "lemma2 | lemma3 | lemma_lb | two_param | mean_var")
      ->required();
  verify->add_option("--instances", ver.instances, "Random instances for lemma2/lemma3")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed-base", ver.seed_base, "Seed of the first instance");

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Print the geometric beta grid, one per line");
  grid_cmd->add_option("--beta-max", grid.beta_max, "Breakdown point, in (0, 1/2]")->required();
  grid_cmd->add_option("--theta", grid.theta, "Grid ratio, > 1")->required();
  grid_cmd->add_option("--epsilon", grid.epsilon, "Target accuracy, > 0")->required();
  grid_cmd->add_option("--f", grid.f, "identity | sqrt | beta-sqrt-log | trimmed-mean")
      ->required();
  grid_cmd->add_option("--sigma", grid.sigma, "Scale for --f trimmed-mean");
  grid_cmd->add_option("--n", grid.n, "Sample size for --f trimmed-mean");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*simulate) return cmd_simulate(sim);
  if (*verify) return cmd_verify(ver);
  if (*grid_cmd) return cmd_grid(grid);
  return kUsage;
}
