#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace betafree {

struct Scalar {
  double value = 0.0;
  friend bool operator==(const Scalar&, const Scalar&) = default;
};

struct Vector {
  std::vector<double> values;
  friend bool operator==(const Vector&, const Vector&) = default;
};

/// Probability mass function over a finite support {0, ..., k-1}.
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws ParameterError unless entries are >= 0 and sum to 1 within
  /// kSumTolerance.
  explicit Pmf(std::vector<double> probabilities);

  const std::vector<double>& probabilities() const noexcept { return probabilities_; }
  std::size_t support_size() const noexcept { return probabilities_.size(); }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probabilities_;
};

using Point = std::variant<Scalar, Vector, Pmf>;

enum class MetricKind { AbsoluteDifference, Euclidean, TotalVariation };

std::string_view to_string(MetricKind kind) noexcept;

/// Distance on one of the supported point representations. Stateless apart
/// from the metric kind; cheap to copy.
class DistanceOracle {
 public:
  constexpr explicit DistanceOracle(MetricKind kind) noexcept : kind_(kind) {}

  constexpr MetricKind kind() const noexcept { return kind_; }

  /// True for scalars and vectors. Total variation has no intersection
  /// routine; callers use the pairwise selector there.
  constexpr bool supports_intersection() const noexcept {
    return kind_ != MetricKind::TotalVariation;
  }

  /// Throws ContractViolation if `p` is not the representation this metric
  /// measures.
  void require_kind(const Point& p) const;

  /// Throws ContractViolation on kind or dimension mismatch.
  void require_compatible(const Point& a, const Point& b) const;

  double operator()(const Point& a, const Point& b) const;

  friend bool operator==(const DistanceOracle&, const DistanceOracle&) = default;

 private:
  MetricKind kind_;
};

inline double distance(const DistanceOracle& oracle, const Point& x, const Point& y) {
  return oracle(x, y);
}

/// Closed ball B(center, radius) = { y : d(center, y) <= radius }.
struct Ball {
  Point center;
  double radius = 0.0;

  Ball(Point c, double r);
};

enum class Feasibility { Found, Empty, Undecided };

std::string_view to_string(Feasibility status) noexcept;

struct IntersectionOutcome {
  Feasibility status = Feasibility::Undecided;
  /// Set iff status == Found. Satisfies d(point, c_i) <= r_i + tolerance.
  std::optional<Point> point;
  /// Projection steps plus Newton steps spent (0 for scalars).
  int iterations = 0;
};

struct FeasibilityOptions {
  /// Budget for the cyclic-projection phase.
  int max_projection_iterations = 10'000;
  /// Budget for the interior-point fallback (total Newton steps).
  int max_newton_iterations = 600;
  /// Starting iterate for vector problems; defaults to the centroid.
  std::optional<Vector> warm_start;
};

/// Finds a point in the intersection of `balls` with radii inflated by
/// `tolerance`.
///
/// Scalars use exact interval arithmetic: the intersection is
/// [max(c_i - r_i - tol), min(c_i + r_i + tol)] and its midpoint is returned.
///
/// Vectors first run cyclic projections onto the most violated ball. When
/// that stalls (tangent or singleton intersections make it sublinear) a
/// log-barrier Newton method minimizes max_i(|y - c_i| - r_i). Its dual
/// iterate yields a rigorous lower bound, so a vector problem can come back
/// Empty as well as Found; Undecided only when both budgets run out.
///
/// Throws CapabilityError for Pmf points and ContractViolation for mixed
/// kinds or dimensions.
IntersectionOutcome intersect_suffix_balls(std::span<const Ball> balls, double tolerance,
                                           const FeasibilityOptions& options = {});

/// max_i (d(y, c_i) - r_i), the worst ball violation of `y`.
double max_violation(const DistanceOracle& oracle, std::span<const Ball> balls, const Point& y);

MetricKind metric_for(const Point& p) noexcept;

std::size_t dimension(const Point& p) noexcept;

/// Human-readable point, e.g. "1.5", "(1, 2)", "pmf(0.5, 0.5)".
std::string format_point(const Point& p);

}  // namespace betafree
