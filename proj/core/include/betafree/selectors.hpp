#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "betafree/error_model.hpp"
#include "betafree/metric.hpp"

namespace betafree {

/// Estimates x_beta keyed by beta, kept in ascending beta order.
class EstimateSeries {
 public:
  struct Entry {
    double beta;
    Point estimate;
  };

  /// Sorts by beta. Throws ParameterError on empty input or non-positive or
  /// repeated betas, ContractViolation on points the oracle cannot compare.
  EstimateSeries(DistanceOracle oracle, std::vector<Entry> entries);

  const DistanceOracle& oracle() const noexcept { return oracle_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const Entry> entries() const noexcept { return entries_; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  std::vector<double> betas() const;

 private:
  DistanceOracle oracle_;
  std::vector<Entry> entries_;
};

enum class SelectorKind { Intersection, Pairwise };

std::string_view to_string(SelectorKind kind) noexcept;
SelectorKind selector_from_string(std::string_view name);

struct SelectionResult {
  double chosen_beta = 0.0;
  Point estimate;
  SelectorKind selector = SelectorKind::Pairwise;
  int guarantee_factor = 3;
  std::size_t distance_evaluations = 0;
  /// Suffixes whose feasibility the vector solver could not decide.
  std::size_t undecided_suffixes = 0;
};

/// Absolute slack on d(x_beta, x_hat) <= f(beta) + f(hat beta), so closed
/// boundary cases survive rounding.
inline constexpr double kPairwiseSlack = 1e-12;

/// Returns x_hat for the smallest hat-beta with
/// d(x_beta, x_hat) <= f(beta) + f(hat-beta) for every beta >= hat-beta.
/// Uses at most size*(size-1)/2 distance evaluations. Works in any metric.
SelectionResult select_pairwise(const EstimateSeries& series, const ErrorModel& f);

/// Smallest beta' whose suffix {B(x_beta, f(beta)) : beta >= beta'} has a
/// common point (radii inflated by `tolerance`), and a point in it.
/// Undecided suffixes count as empty but do not stop the scan: a certified
/// point at a smaller beta' still qualifies. Throws CapabilityError for
/// total-variation series.
SelectionResult select_intersection(const EstimateSeries& series, const ErrorModel& f,
                                    double tolerance, const FeasibilityOptions& options = {});

/// 1e-9 * max f(beta) over the series, the default additive slack.
double default_tolerance(const EstimateSeries& series, const ErrorModel& f);

}  // namespace betafree
