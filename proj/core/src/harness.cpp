#include "betafree/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <yaml-cpp/yaml.h>

#include "betafree/errors.hpp"
#include "betafree/meta.hpp"

namespace betafree {

// ---------------------------------------------------------------------------
// Config

namespace {

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  const YAML::Node v = node[key];
  return v ? v.as<T>() : fallback;
}

template <typename T>
T require(const YAML::Node& node, const char* key, std::string_view where) {
  const YAML::Node v = node[key];
  if (!v) {
    throw ParameterError(fmt::format("{}: missing required key '{}'", where, key));
  }
  return v.as<T>();
}

Scenario parse_scenario(const YAML::Node& node, std::size_t index) {
  const std::string where = fmt::format("scenario #{}", index);
  Scenario s;
  s.id = require<std::string>(node, "id", where);
  if (s.id.empty() || s.id.find_first_of(",\"\n\r") != std::string::npos) {
    throw ParameterError(fmt::format("{}: id '{}' must be nonempty without commas, quotes or "
                                     "newlines",
                                     where, s.id));
  }
  const auto model = get_or<std::string>(node, "model", "gaussian");
  if (model == "gaussian") {
    s.clean = GaussianMean{get_or(node, "mu", 0.0), get_or(node, "sigma", 1.0)};
    if (!(std::get<GaussianMean>(s.clean).sigma >= 0.0)) {
      throw ParameterError(fmt::format("{}: sigma must be >= 0", where));
    }
  } else if (model == "bernoulli") {
    BernoulliPmf b;
    b.p = require<double>(node, "p", where);
    if (node["support"]) {
      const auto support = node["support"].as<std::vector<double>>();
      if (support.size() != 2) {
        throw ParameterError(fmt::format("{}: support needs exactly two values", where));
      }
      b.support = {support[0], support[1]};
    }
    if (!(b.p >= 0.0 && b.p <= 1.0)) {
      throw ParameterError(fmt::format("{}: p must lie in [0, 1]", where));
    }
    s.clean = b;
  } else {
    throw ParameterError(fmt::format("{}: unknown model '{}'", where, model));
  }
  s.alpha = require<double>(node, "alpha", where);
  if (!(s.alpha >= 0.0 && s.alpha < 0.5)) {
    throw ParameterError(fmt::format("{}: alpha must lie in [0, 1/2)", where));
  }
  const auto n = require<long long>(node, "n", where);
  if (n < 1) {
    throw ParameterError(fmt::format("{}: n must be >= 1", where));
  }
  s.n = static_cast<std::size_t>(n);
  const auto contamination = get_or<std::string>(node, "contamination", "adaptive-worst");
  if (contamination == "adaptive-worst") {
    s.contamination = AdaptiveWorst{};
  } else if (contamination == "point-mass") {
    s.contamination = PointMass{require<double>(node, "location", where)};
  } else if (contamination == "support-point") {
    s.contamination = SupportPoint{require<std::size_t>(node, "index", where)};
  } else {
    throw ParameterError(fmt::format("{}: unknown contamination '{}'", where, contamination));
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  RunConfig cfg;
  try {
    const YAML::Node root = YAML::Load(yaml_text);
    if (!root.IsMap()) {
      throw ParameterError("config root must be a mapping");
    }
    const long long trials = get_or<long long>(root, "trials", 1);
    if (trials < 1) {
      throw ParameterError("trials must be >= 1");
    }
    cfg.trials = static_cast<std::size_t>(trials);
    cfg.seed_base = get_or<std::uint64_t>(root, "seed_base", 0);
    cfg.selector = selector_from_string(get_or<std::string>(root, "selector", "pairwise"));
    const auto estimator = get_or<std::string>(root, "estimator", "trimmed-mean");
    if (estimator == "trimmed-mean") {
      cfg.estimator = EstimatorKind::TrimmedMean;
    } else if (estimator == "variance-prune") {
      cfg.estimator = EstimatorKind::VariancePrune;
    } else {
      throw ParameterError(fmt::format("unknown estimator '{}'", estimator));
    }
    cfg.stop_factor = get_or(root, "stop_factor", 4.0);
    if (const YAML::Node grid = root["grid"]) {
      cfg.grid.beta_max = get_or(grid, "beta_max", cfg.grid.beta_max);
      cfg.grid.theta = get_or(grid, "theta", cfg.grid.theta);
      cfg.grid.epsilon = get_or(grid, "epsilon", cfg.grid.epsilon);
    }
    if (!(cfg.grid.theta > 1.0)) {
      throw ParameterError("grid.theta must be > 1");
    }
    if (!(cfg.grid.beta_max > 0.0 && cfg.grid.beta_max < 0.5)) {
      throw ParameterError("grid.beta_max must lie in (0, 1/2)");
    }
    if (!(cfg.grid.epsilon > 0.0)) {
      throw ParameterError("grid.epsilon must be > 0");
    }
    if (const YAML::Node out = root["output"]) {
      cfg.output = out.as<std::string>();
    }
    const YAML::Node scenarios = root["scenarios"];
    if (!scenarios || !scenarios.IsSequence() || scenarios.size() == 0) {
      throw ParameterError("config needs a nonempty 'scenarios' list");
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      cfg.scenarios.push_back(parse_scenario(scenarios[i], i));
    }
  } catch (const YAML::Exception& e) {
    throw ParameterError(fmt::format("config: {}", e.what()));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParameterError(fmt::format("cannot read config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{:.17g}\n",
               r.scenario_id, r.seed, r.alpha, r.beta_max, r.theta, r.epsilon,
               to_string(r.selector), r.chosen_beta, r.estimate, r.true_error, r.bound,
               r.bound_satisfied ? "true" : "false", r.grid_len, r.wall_ms);
  }
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParameterError(fmt::format("csv line {}: cannot parse '{}'", line, field));
  }
  return value;
}

}  // namespace

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParameterError("csv header does not match the trial schema");
  }
  std::vector<TrialRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 14) {
      throw ParameterError(fmt::format("csv line {}: expected 14 fields, got {}", lineno, f.size()));
    }
    TrialRecord r;
    r.scenario_id = std::string(f[0]);
    r.seed = parse_number<std::uint64_t>(f[1], lineno);
    r.alpha = parse_number<double>(f[2], lineno);
    r.beta_max = parse_number<double>(f[3], lineno);
    r.theta = parse_number<double>(f[4], lineno);
    r.epsilon = parse_number<double>(f[5], lineno);
    r.selector = selector_from_string(f[6]);
    r.chosen_beta = parse_number<double>(f[7], lineno);
    r.estimate = parse_number<double>(f[8], lineno);
    r.true_error = parse_number<double>(f[9], lineno);
    r.bound = parse_number<double>(f[10], lineno);
    if (f[11] != "true" && f[11] != "false") {
      throw ParameterError(fmt::format("csv line {}: bad bound_satisfied '{}'", lineno, f[11]));
    }
    r.bound_satisfied = f[11] == "true";
    r.grid_len = parse_number<std::size_t>(f[12], lineno);
    r.wall_ms = parse_number<double>(f[13], lineno);
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Simulation

TrialRecord run_trial(const RunConfig& config, const Scenario& scenario, std::uint64_t seed,
                      std::size_t* invocations, bool record_wallclock) {
  const auto start = std::chrono::steady_clock::now();
  Scenario s = scenario;
  s.seed = seed;
  const Dataset data = sample_contaminated(s);
  const double sigma = clean_sigma(s.clean);
  const ErrorModel f = ErrorModel::trimmed_mean(sigma, s.n);
  const BetaGrid grid =
      build_beta_grid(config.grid.beta_max, config.grid.theta, config.grid.epsilon, f);

  MetaRun run;
  if (config.estimator == EstimatorKind::TrimmedMean) {
    run = run_meta(TrimmedMeanEstimator{}, grid, f, config.selector, data);
  } else {
    run = run_meta(VariancePruneEstimator{sigma, config.stop_factor}, grid, f, config.selector,
                   data);
  }
  if (invocations != nullptr) *invocations = run.invocations;

  TrialRecord r;
  r.scenario_id = s.id;
  r.seed = seed;
  r.alpha = s.alpha;
  r.beta_max = config.grid.beta_max;
  r.theta = config.grid.theta;
  r.epsilon = config.grid.epsilon;
  r.selector = config.selector;
  r.chosen_beta = run.selection.chosen_beta;
  r.estimate = std::get<Scalar>(run.selection.estimate).value;
  r.true_error = std::abs(r.estimate - clean_mean(s.clean));
  const double cover = grid_cover(grid, s.alpha).value_or(grid.beta_max());
  r.bound = run.selection.guarantee_factor * f(cover);
  const double slack = config.selector == SelectorKind::Intersection ? 2e-9 * f(grid.beta_max()) : 0.0;
  r.bound_satisfied = r.true_error <= r.bound + slack;
  r.grid_len = grid.size();
  if (record_wallclock) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  }
  return r;
}

SimulationResult run_simulation(const RunConfig& config, const SimulationOptions& options) {
  const std::size_t per = config.trials;
  const std::size_t total = per * config.scenarios.size();
  SimulationResult result;
  result.records.resize(total);
  result.invocations.resize(total);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(total);
  auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      try {
        const auto& scenario = config.scenarios[k / per];
        result.records[k] = run_trial(config, scenario, config.seed_base + k % per,
                                      &result.invocations[k], options.record_wallclock);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1U, options.jobs);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 1; w < jobs; ++w) workers.emplace_back(work);
    work();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Summary

namespace {

double nearest_rank(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

}  // namespace

std::vector<ScenarioSummary> summarize(const std::vector<TrialRecord>& records,
                                       const std::vector<std::size_t>& invocations) {
  std::vector<ScenarioSummary> out;
  std::vector<std::vector<double>> errors;
  std::vector<double> calls;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const ScenarioSummary& s) { return s.scenario_id == r.scenario_id; });
    if (it == out.end()) {
      out.push_back({r.scenario_id, 0, 0.0, 0.0, 0, 0.0, r.grid_len});
      errors.emplace_back();
      calls.push_back(0.0);
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    ++it->trials;
    errors[idx].push_back(r.true_error);
    if (!r.bound_satisfied) ++it->violations;
    calls[idx] += static_cast<double>(invocations.empty() ? r.grid_len : invocations[i]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].median_error = nearest_rank(errors[i], 0.5);
    out[i].p95_error = nearest_rank(errors[i], 0.95);
    out[i].mean_invocations = calls[i] / static_cast<double>(out[i].trials);
  }
  return out;
}

void print_summary(std::ostream& out, const std::vector<ScenarioSummary>& summary) {
  fmt::print(out, "{:<20} {:>7} {:>12} {:>12} {:>10} {:>12} {:>8}\n", "scenario", "trials",
             "median_err", "p95_err", "violations", "invocations", "grid_len");
  for (const auto& s : summary) {
    fmt::print(out, "{:<20} {:>7} {:>12.6f} {:>12.6f} {:>10} {:>12.2f} {:>8}\n", s.scenario_id,
               s.trials, s.median_error, s.p95_error, s.violations, s.mean_invocations, s.grid_len);
  }
}

}  // namespace betafree
