#include "betafree/meta.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "betafree/errors.hpp"

namespace betafree {

SelectionResult select(const EstimateSeries& series, const ErrorModel& f, SelectorKind selector,
                       double tolerance, const FeasibilityOptions& feasibility) {
  if (selector == SelectorKind::Pairwise) {
    return select_pairwise(series, f);
  }
  const double tol = tolerance >= 0.0 ? tolerance : default_tolerance(series, f);
  return select_intersection(series, f, tol, feasibility);
}

MetaRun run_meta(const BaseEstimator& base, const BetaGrid& grid, const ErrorModel& f,
                 SelectorKind selector, const Dataset& data, const MetaOptions& options) {
  if (grid.betas.empty()) {
    throw ParameterError("beta grid is empty");
  }
  MetaRun run;
  run.audit.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) run.audit[i].beta = grid.betas[i];

  std::atomic<std::size_t> calls{0};
  auto invoke = [&](std::size_t i) {
    ++calls;
    try {
      run.audit[i].estimate = base.estimate(data, grid.betas[i]);
    } catch (const std::exception& e) {
      run.audit[i].failure = e.what();
    }
  };

  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs, grid.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) invoke(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) invoke(i);
      });
    }
  }
  run.invocations = calls.load();

  std::vector<EstimateSeries::Entry> entries;
  for (const auto& a : run.audit) {
    if (a.estimate) {
      entries.push_back({a.beta, *a.estimate});
    } else {
      run.dropped.push_back(a.beta);
      spdlog::warn("{} failed at beta={:.6g}, dropping it from the series: {}", base.name(),
                   a.beta, a.failure);
    }
  }
  if (entries.empty()) {
    throw BreakdownError(fmt::format("{} failed at every grid beta", base.name()));
  }
  const DistanceOracle oracle(metric_for(entries.front().estimate));
  const EstimateSeries series(oracle, std::move(entries));
  run.selection = select(series, f, selector, options.tolerance, options.feasibility);
  return run;
}

}  // namespace betafree
