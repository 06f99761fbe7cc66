#include "betafree/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "betafree/errors.hpp"

namespace betafree {

Pmf::Pmf(std::vector<double> probabilities) : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) {
    throw ParameterError("pmf needs a nonempty support");
  }
  double total = 0.0;
  for (double p : probabilities_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ParameterError(fmt::format("pmf entry {} is not a finite nonnegative number", p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ParameterError(fmt::format("pmf entries sum to {:.17g}, expected 1", total));
  }
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::AbsoluteDifference: return "absolute";
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::TotalVariation: return "total-variation";
  }
  return "unknown";
}

std::string_view to_string(Feasibility status) noexcept {
  switch (status) {
    case Feasibility::Found: return "found";
    case Feasibility::Empty: return "empty";
    case Feasibility::Undecided: return "undecided";
  }
  return "unknown";
}

MetricKind metric_for(const Point& p) noexcept {
  switch (p.index()) {
    case 0: return MetricKind::AbsoluteDifference;
    case 1: return MetricKind::Euclidean;
    default: return MetricKind::TotalVariation;
  }
}

std::size_t dimension(const Point& p) noexcept {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Scalar>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Vector>) {
          return v.values.size();
        } else {
          return v.support_size();
        }
      },
      p);
}

void DistanceOracle::require_kind(const Point& p) const {
  if (metric_for(p) != kind_) {
    throw ContractViolation(fmt::format("point of kind {} passed to {} metric",
                                        to_string(metric_for(p)), to_string(kind_)));
  }
}

void DistanceOracle::require_compatible(const Point& a, const Point& b) const {
  require_kind(a);
  require_kind(b);
  if (dimension(a) != dimension(b)) {
    throw ContractViolation(
        fmt::format("dimension mismatch: {} vs {}", dimension(a), dimension(b)));
  }
}

double DistanceOracle::operator()(const Point& a, const Point& b) const {
  require_compatible(a, b);
  switch (kind_) {
    case MetricKind::AbsoluteDifference:
      return std::abs(std::get<Scalar>(a).value - std::get<Scalar>(b).value);
    case MetricKind::Euclidean: {
      const auto& x = std::get<Vector>(a).values;
      const auto& y = std::get<Vector>(b).values;
      double sq = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        sq += diff * diff;
      }
      return std::sqrt(sq);
    }
    case MetricKind::TotalVariation: {
      const auto& p = std::get<Pmf>(a).probabilities();
      const auto& q = std::get<Pmf>(b).probabilities();
      double l1 = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        l1 += std::abs(p[i] - q[i]);
      }
      return 0.5 * l1;
    }
  }
  return 0.0;
}

Ball::Ball(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(r >= 0.0)) {
    throw ParameterError(fmt::format("ball radius must be >= 0, got {}", r));
  }
}

double max_violation(const DistanceOracle& oracle, std::span<const Ball> balls, const Point& y) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Ball& b : balls) {
    worst = std::max(worst, oracle(y, b.center) - b.radius);
  }
  return worst;
}

std::string format_point(const Point& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Scalar>) {
          return fmt::format("{:.17g}", v.value);
        } else if constexpr (std::is_same_v<T, Vector>) {
          return fmt::format("({:.17g})", fmt::join(v.values, ", "));
        } else {
          return fmt::format("pmf({:.17g})", fmt::join(v.probabilities(), ", "));
        }
      },
      p);
}

}  // namespace betafree
