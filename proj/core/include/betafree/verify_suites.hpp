#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "betafree/beta_grid.hpp"
#include "betafree/error_model.hpp"
#include "betafree/metric.hpp"

namespace betafree {

enum class Suite { Factor2, Factor3, LowerBound, TwoParam, MeanVar };

std::optional<Suite> suite_from_string(std::string_view name) noexcept;
std::string_view to_string(Suite suite) noexcept;

struct SuiteOptions {
  std::size_t instances = 10'000;
  std::uint64_t seed_base = 20'240'601;
};

struct SuiteReport {
  Suite suite = Suite::Factor2;
  bool passed = true;
  std::vector<std::string> lines;
  /// Seed of the first failing instance, replayable with replay_instance.
  std::optional<std::uint64_t> failing_seed;
};

/// A random instance family member: metric, grid of length 1..50 and one of
/// identity, sqrt, beta-sqrt-log.
struct FamilyDraw {
  MetricKind metric = MetricKind::AbsoluteDifference;
  BetaGrid grid;
  ErrorModel f = ErrorModel::identity();
};

FamilyDraw draw_family(std::uint64_t seed, std::span<const MetricKind> metrics);

SuiteReport run_suite(Suite suite, const SuiteOptions& options = {});

}  // namespace betafree
