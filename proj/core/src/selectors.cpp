#include "betafree/selectors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "betafree/errors.hpp"

namespace betafree {

EstimateSeries::EstimateSeries(DistanceOracle oracle, std::vector<Entry> entries)
    : oracle_(oracle), entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw ParameterError("estimate series is empty");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.beta < b.beta; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!(entries_[i].beta > 0.0) || !std::isfinite(entries_[i].beta)) {
      throw ParameterError(fmt::format("beta {} is not positive", entries_[i].beta));
    }
    if (i > 0 && entries_[i].beta == entries_[i - 1].beta) {
      throw ParameterError(fmt::format("beta {} appears twice", entries_[i].beta));
    }
    oracle_.require_compatible(entries_.front().estimate, entries_[i].estimate);
  }
}

std::vector<double> EstimateSeries::betas() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.beta);
  return out;
}

std::string_view to_string(SelectorKind kind) noexcept {
  return kind == SelectorKind::Intersection ? "intersection" : "pairwise";
}

SelectorKind selector_from_string(std::string_view name) {
  if (name == "intersection") return SelectorKind::Intersection;
  if (name == "pairwise") return SelectorKind::Pairwise;
  throw ParameterError(fmt::format("unknown selector '{}'", name));
}

namespace {

std::vector<double> radii_for(const EstimateSeries& series, const ErrorModel& f) {
  const auto betas = series.betas();
  if (!is_monotone_on(f, betas)) {
    throw ParameterError(fmt::format("error model {} is not non-decreasing and nonnegative on "
                                     "the series betas",
                                     f.name()));
  }
  std::vector<double> radii;
  radii.reserve(betas.size());
  for (double b : betas) radii.push_back(f(b));
  return radii;
}

}  // namespace

SelectionResult select_pairwise(const EstimateSeries& series, const ErrorModel& f) {
  const auto radii = radii_for(series, f);
  const std::size_t n = series.size();
  SelectionResult result;
  result.selector = SelectorKind::Pairwise;
  result.guarantee_factor = 3;
  for (std::size_t cand = 0; cand < n; ++cand) {
    bool holds = true;
    for (std::size_t j = cand + 1; j < n && holds; ++j) {
      const double d = series.oracle()(series[j].estimate, series[cand].estimate);
      ++result.distance_evaluations;
      holds = d <= radii[j] + radii[cand] + kPairwiseSlack;
    }
    if (holds) {
      result.chosen_beta = series[cand].beta;
      result.estimate = series[cand].estimate;
      return result;
    }
  }
  // Unreachable: the largest beta has no constraints.
  throw std::logic_error("pairwise selector found no candidate");
}

SelectionResult select_intersection(const EstimateSeries& series, const ErrorModel& f,
                                    double tolerance, const FeasibilityOptions& options) {
  if (!series.oracle().supports_intersection()) {
    throw CapabilityError(fmt::format("{} metric has no ball intersection; use select_pairwise",
                                      to_string(series.oracle().kind())));
  }
  const auto radii = radii_for(series, f);
  const std::size_t n = series.size();

  std::vector<Ball> suffix;
  suffix.reserve(n);
  SelectionResult result;
  result.selector = SelectorKind::Intersection;
  result.guarantee_factor = 2;
  bool have_point = false;
  FeasibilityOptions opts = options;

  // Nested suffixes: once one is certified empty, every smaller one is too.
  for (std::size_t k = n; k-- > 0;) {
    suffix.emplace_back(series[k].estimate, radii[k]);
    const IntersectionOutcome outcome = intersect_suffix_balls(suffix, tolerance, opts);
    if (outcome.status == Feasibility::Empty) {
      break;
    }
    if (outcome.status == Feasibility::Undecided) {
      ++result.undecided_suffixes;
      continue;
    }
    result.chosen_beta = series[k].beta;
    result.estimate = *outcome.point;
    have_point = true;
    if (const auto* v = std::get_if<Vector>(&result.estimate)) {
      opts.warm_start = *v;
    }
  }
  if (!have_point) {
    // The single largest ball always contains its own center.
    result.chosen_beta = series[n - 1].beta;
    result.estimate = series[n - 1].estimate;
  }
  return result;
}

double default_tolerance(const EstimateSeries& series, const ErrorModel& f) {
  double largest = 0.0;
  for (const auto& e : series.entries()) largest = std::max(largest, f(e.beta));
  return 1e-9 * largest;
}

}  // namespace betafree
