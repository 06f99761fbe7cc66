#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "betafree/beta_grid.hpp"
#include "betafree/errors.hpp"
#include "betafree/harness.hpp"

namespace betafree {
namespace {

constexpr const char* kSmallConfig = R"(
trials: 12
seed_base: 100
selector: pairwise
grid: {beta_max: 0.4, theta: 1.1, epsilon: 0.01}
scenarios:
  - {id: clean, model: gaussian, mu: 0, sigma: 1, alpha: 0.0, n: 2000}
  - {id: shifted, model: gaussian, mu: 5, sigma: 2, alpha: 0.1, n: 2000}
  - {id: coin, model: bernoulli, p: 0.3, alpha: 0.05, n: 1000, contamination: support-point, index: 1}
)";

TEST(Config, ParsesTheSchema) {
  const auto cfg = parse_config(kSmallConfig);
  EXPECT_EQ(cfg.trials, 12u);
  EXPECT_EQ(cfg.seed_base, 100u);
  EXPECT_EQ(cfg.selector, SelectorKind::Pairwise);
  ASSERT_EQ(cfg.scenarios.size(), 3u);
  EXPECT_EQ(cfg.scenarios[1].id, "shifted");
  EXPECT_EQ(std::get<GaussianMean>(cfg.scenarios[1].clean).sigma, 2.0);
  EXPECT_TRUE(std::holds_alternative<SupportPoint>(cfg.scenarios[2].contamination));
  EXPECT_EQ(cfg.grid.theta, 1.1);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("trials: 3\n"), ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: a, alpha: 0.1, n: 10}]\ngrid: {theta: 1.0}\n"),
               ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: a, alpha: 0.1, n: 10}]\ngrid: {beta_max: 0.5}\n"),
               ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: a, model: cauchy, alpha: 0.1, n: 10}]\n"),
               ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: 'a,b', alpha: 0.1, n: 10}]\n"), ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: a, alpha: 0.6, n: 10}]\n"), ParameterError);
  EXPECT_THROW(parse_config("scenarios: [{id: a, alpha: 0.1}]\n"), ParameterError);
  EXPECT_THROW(parse_config("selector: nearest\nscenarios: [{id: a, alpha: 0.1, n: 10}]\n"),
               ParameterError);
  EXPECT_THROW(parse_config(": : :\n"), ParameterError);
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), ParameterError);
}

TEST(Csv, HeaderIsExact) {
  std::ostringstream out;
  write_csv(out, {});
  EXPECT_EQ(out.str(),
            "scenario_id,seed,alpha,beta_max,theta,epsilon,selector,chosen_beta,estimate,"
            "true_error,bound,bound_satisfied,grid_len,wall_ms\n");
}

TEST(Csv, RoundTripIsFieldForField) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<TrialRecord> records;
  for (int i = 0; i < 1'000; ++i) {
    TrialRecord r;
    r.scenario_id = "s" + std::to_string(i % 7);
    r.seed = rng();
    r.alpha = u(rng) * 1e-5;
    r.beta_max = std::ldexp(u(rng), -(i % 60));
    r.theta = 1.0 + std::abs(u(rng));
    r.epsilon = std::nextafter(0.01, 1.0);
    r.selector = i % 2 ? SelectorKind::Pairwise : SelectorKind::Intersection;
    r.chosen_beta = u(rng);
    r.estimate = u(rng) * 1e200;
    r.true_error = std::abs(u(rng)) * 1e-300;
    r.bound = 5e-324;
    r.bound_satisfied = i % 3 == 0;
    r.grid_len = static_cast<std::size_t>(rng() % 1000);
    r.wall_ms = std::abs(u(rng));
    records.push_back(r);
  }
  std::stringstream io;
  write_csv(io, records);
  EXPECT_EQ(read_csv(io), records);
}

TEST(Csv, MalformedInputRejected) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_csv(bad_header), ParameterError);
  std::istringstream short_row(std::string(kCsvHeader) + "\nx,1,2\n");
  EXPECT_THROW(read_csv(short_row), ParameterError);
  std::istringstream bad_bool(std::string(kCsvHeader) +
                              "\nx,1,0,0.4,1.1,0.01,pairwise,0.4,0,0,1,yes,3,0\n");
  EXPECT_THROW(read_csv(bad_bool), ParameterError);
}

TEST(Simulation, ReplayIsByteIdenticalAcrossJobCounts) {
  const auto cfg = parse_config(kSmallConfig);
  auto csv = [&](unsigned jobs) {
    std::ostringstream out;
    write_csv(out, run_simulation(cfg, {jobs, false}).records);
    return out.str();
  };
  const std::string one = csv(1);
  EXPECT_EQ(one, csv(1));
  EXPECT_EQ(one, csv(4));
}

TEST(Simulation, RecordsCarryTheConfiguration) {
  const auto cfg = parse_config(kSmallConfig);
  const auto result = run_simulation(cfg, {2, false});
  ASSERT_EQ(result.records.size(), 36u);
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const auto& r = result.records[k];
    EXPECT_EQ(r.seed, 100u + k % 12);
    EXPECT_EQ(r.wall_ms, 0.0);
    EXPECT_EQ(result.invocations[k], r.grid_len);
    const auto& sc = cfg.scenarios[k / 12];
    const auto f = ErrorModel::trimmed_mean(clean_sigma(sc.clean), sc.n);
    const double inverse = f.inverse_at(0.01, 0.4);
    EXPECT_EQ(r.grid_len, static_cast<std::size_t>(std::ceil(std::log(0.4 / inverse) / std::log(1.1))) + 1)
        << r.scenario_id;
  }
}

TEST(Simulation, CleanScenarioHasNoViolations) {
  const auto cfg = parse_config(kSmallConfig);
  const auto summary = summarize(run_simulation(cfg).records);
  ASSERT_EQ(summary[0].scenario_id, "clean");
  EXPECT_EQ(summary[0].violations, 0u);
}

TEST(Summary, MatchesARecountFromTheCsv) {
  const auto cfg = parse_config(kSmallConfig);
  const auto result = run_simulation(cfg);
  std::stringstream io;
  write_csv(io, result.records);
  const auto reread = read_csv(io);
  const auto summary = summarize(reread);
  ASSERT_EQ(summary.size(), 3u);
  for (const auto& s : summary) {
    std::size_t violations = 0;
    std::size_t trials = 0;
    std::vector<double> errors;
    for (const auto& r : reread) {
      if (r.scenario_id != s.scenario_id) continue;
      ++trials;
      violations += !r.bound_satisfied;
      errors.push_back(r.true_error);
    }
    std::sort(errors.begin(), errors.end());
    EXPECT_EQ(s.trials, trials);
    EXPECT_EQ(s.violations, violations);
    EXPECT_EQ(s.median_error, errors[(trials + 1) / 2 - 1]);
    EXPECT_EQ(s.p95_error, errors[static_cast<std::size_t>(std::ceil(0.95 * trials)) - 1]);
  }
  std::ostringstream table;
  print_summary(table, summary);
  EXPECT_NE(table.str().find("shifted"), std::string::npos);
}

}  // namespace
}  // namespace betafree
