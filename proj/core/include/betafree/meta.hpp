#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "betafree/base_estimators.hpp"
#include "betafree/beta_grid.hpp"
#include "betafree/dataset.hpp"
#include "betafree/error_model.hpp"
#include "betafree/selectors.hpp"

namespace betafree {

/// What the base estimator returned at one grid point.
struct AuditEntry {
  double beta = 0.0;
  std::optional<Point> estimate;
  /// Exception text when the estimator failed and beta was dropped.
  std::string failure;
};

struct MetaRun {
  SelectionResult selection;
  /// One entry per grid beta, in grid (decreasing) order.
  std::vector<AuditEntry> audit;
  std::size_t invocations = 0;
  std::vector<double> dropped;
};

struct MetaOptions {
  /// Additive radius slack for the intersection selector; negative selects
  /// default_tolerance().
  double tolerance = -1.0;
  /// Worker threads for the per-beta base runs.
  unsigned jobs = 1;
  FeasibilityOptions feasibility;
};

/// Runs `base` once per grid beta, assembles the estimate series and applies
/// the selector. A beta whose run throws is dropped with a warning; if every
/// run fails, BreakdownError.
MetaRun run_meta(const BaseEstimator& base, const BetaGrid& grid, const ErrorModel& f,
                 SelectorKind selector, const Dataset& data, const MetaOptions& options = {});

/// Selector applied to an already-built series.
SelectionResult select(const EstimateSeries& series, const ErrorModel& f, SelectorKind selector,
                       double tolerance = -1.0, const FeasibilityOptions& feasibility = {});

}  // namespace betafree
