#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "betafree/adversary_sim.hpp"
#include "betafree/selectors.hpp"

namespace betafree {

struct GridParams {
  double beta_max = 0.4;
  double theta = 1.1;
  double epsilon = 0.01;
};

enum class EstimatorKind { TrimmedMean, VariancePrune };

/// Parsed experiment file. Scenario seeds are ignored; trial i of every
/// scenario uses seed_base + i.
struct RunConfig {
  std::vector<Scenario> scenarios;
  GridParams grid;
  SelectorKind selector = SelectorKind::Pairwise;
  EstimatorKind estimator = EstimatorKind::TrimmedMean;
  double stop_factor = 4.0;
  std::size_t trials = 1;
  std::uint64_t seed_base = 0;
  std::filesystem::path output;
};

/// Throws ParameterError with a readable message on any schema problem.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& yaml_text);

/// One row of the results CSV.
struct TrialRecord {
  std::string scenario_id;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double beta_max = 0.0;
  double theta = 0.0;
  double epsilon = 0.0;
  SelectorKind selector = SelectorKind::Pairwise;
  double chosen_beta = 0.0;
  double estimate = 0.0;
  double true_error = 0.0;
  /// guarantee_factor * f(alpha'), alpha' the grid cover of alpha.
  double bound = 0.0;
  bool bound_satisfied = false;
  std::size_t grid_len = 0;
  double wall_ms = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline constexpr const char* kCsvHeader =
    "scenario_id,seed,alpha,beta_max,theta,epsilon,selector,chosen_beta,estimate,true_error,"
    "bound,bound_satisfied,grid_len,wall_ms";

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
/// Throws ParameterError on a bad header or malformed row.
std::vector<TrialRecord> read_csv(std::istream& in);

struct SimulationOptions {
  unsigned jobs = 1;
  /// When false wall_ms is written as 0 so reruns are byte-identical.
  bool record_wallclock = false;
};

struct SimulationResult {
  std::vector<TrialRecord> records;
  /// Base-estimator calls per record, parallel to `records`.
  std::vector<std::size_t> invocations;
};

SimulationResult run_simulation(const RunConfig& config, const SimulationOptions& options = {});

/// One simulated trial (exposed for tests).
TrialRecord run_trial(const RunConfig& config, const Scenario& scenario, std::uint64_t seed,
                      std::size_t* invocations = nullptr, bool record_wallclock = false);

struct ScenarioSummary {
  std::string scenario_id;
  std::size_t trials = 0;
  double median_error = 0.0;
  double p95_error = 0.0;
  std::size_t violations = 0;
  double mean_invocations = 0.0;
  std::size_t grid_len = 0;
};

/// Groups by scenario in order of first appearance. Percentiles use the
/// nearest-rank rule. `invocations` may be empty (e.g. re-read from CSV), in
/// which case grid_len stands in for the call count.
std::vector<ScenarioSummary> summarize(const std::vector<TrialRecord>& records,
                                       const std::vector<std::size_t>& invocations = {});

void print_summary(std::ostream& out, const std::vector<ScenarioSummary>& summary);

}  // namespace betafree
