#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "betafree/errors.hpp"
#include "betafree/metric.hpp"

namespace betafree {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

IntersectionOutcome intersect_intervals(std::span<const Ball> balls, double tolerance) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const Ball& b : balls) {
    const double c = std::get<Scalar>(b.center).value;
    lo = std::max(lo, c - b.radius - tolerance);
    hi = std::min(hi, c + b.radius + tolerance);
  }
  if (lo > hi) {
    return {Feasibility::Empty, std::nullopt, 0};
  }
  return {Feasibility::Found, Point{Scalar{0.5 * lo + 0.5 * hi}}, 0};
}

// Dense view of the vector problem: centers as columns.
struct BallSystem {
  MatrixXd centers;  // d x m
  VectorXd radii;    // m
  double scale = 1.0;

  int dim() const { return static_cast<int>(centers.rows()); }
  int count() const { return static_cast<int>(centers.cols()); }

  double violation(const VectorXd& y, int* argmax = nullptr) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count(); ++i) {
      const double v = (y - centers.col(i)).norm() - radii[i];
      if (v > worst) {
        worst = v;
        if (argmax != nullptr) *argmax = i;
      }
    }
    return worst;
  }
};

BallSystem make_system(std::span<const Ball> balls) {
  const auto d = static_cast<Eigen::Index>(std::get<Vector>(balls.front().center).values.size());
  const auto m = static_cast<Eigen::Index>(balls.size());
  BallSystem sys{MatrixXd(d, m), VectorXd(m), 1.0};
  double extent = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = std::get<Vector>(balls[static_cast<std::size_t>(i)].center).values;
    sys.centers.col(i) = Eigen::Map<const VectorXd>(c.data(), d);
    sys.radii[i] = balls[static_cast<std::size_t>(i)].radius;
    extent = std::max(extent, sys.radii[i]);
  }
  const VectorXd centroid = sys.centers.rowwise().mean();
  for (Eigen::Index i = 0; i < m; ++i) {
    extent = std::max(extent, (sys.centers.col(i) - centroid).norm());
  }
  sys.scale = extent > 0.0 ? extent : 1.0;
  return sys;
}

Point to_point(const VectorXd& y) { return Vector{std::vector<double>(y.data(), y.data() + y.size())}; }

// Two balls farther apart than the sum of their (inflated) radii cannot
// share a point. Exact up to a few ulps of the problem scale.
bool pairwise_disjoint(const BallSystem& sys, double tolerance) {
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * sys.scale;
  for (int i = 0; i < sys.count(); ++i) {
    for (int j = i + 1; j < sys.count(); ++j) {
      const double gap = (sys.centers.col(i) - sys.centers.col(j)).norm();
      if (gap > sys.radii[i] + sys.radii[j] + 2.0 * tolerance + slack) {
        return true;
      }
    }
  }
  return false;
}

// Projects onto the most violated ball until feasible or stalled. A stall
// is no halving of the violation over a window of iterations.
bool cyclic_projections(const BallSystem& sys, double tolerance, int budget, VectorXd& y,
                        int& iterations) {
  constexpr int kWindow = 64;
  double checkpoint = std::numeric_limits<double>::infinity();
  for (int it = 0; it < budget; ++it) {
    int worst = 0;
    const double v = sys.violation(y, &worst);
    if (v <= tolerance) {
      return true;
    }
    if (it % kWindow == 0) {
      if (v > 0.5 * checkpoint) {
        return false;
      }
      checkpoint = v;
    }
    const VectorXd offset = y - sys.centers.col(worst);
    const double len = offset.norm();
    y = sys.centers.col(worst) + offset * (sys.radii[worst] / len);
    ++iterations;
  }
  return false;
}

// Rigorous lower bound on s* = min_y max_i (|y - c_i| - r_i) from the
// barrier's dual estimate. Any (v_i, w_i) with |w_i| <= v_i, sum v = 1 and
// sum w = 0 certifies s* >= sum w_i.c_i - sum v_i r_i; the raw estimate is
// repaired to satisfy those constraints exactly before use.
double dual_lower_bound(const BallSystem& sys, const VectorXd& y, double s, double tau) {
  const int m = sys.count();
  VectorXd v(m);
  MatrixXd w(sys.dim(), m);
  for (int i = 0; i < m; ++i) {
    const VectorXd u = y - sys.centers.col(i);
    const double t = sys.radii[i] + s;
    const double n = u.norm();
    const double gap = (t - n) * (t + n);
    v[i] = 2.0 * t / (tau * gap);
    w.col(i) = -2.0 * u / (tau * gap);
  }
  const double vsum = v.sum();
  const VectorXd residual = w.rowwise().sum();
  for (int i = 0; i < m; ++i) {
    w.col(i) -= residual * (v[i] / vsum);
    v[i] = std::max(v[i], w.col(i).norm());
  }
  const double norm = v.sum();
  double bound = 0.0;
  for (int i = 0; i < m; ++i) {
    bound += w.col(i).dot(sys.centers.col(i)) - v[i] * sys.radii[i];
  }
  return bound / norm;
}

// Log-barrier path following for  min s  s.t. |y - c_i| <= r_i + s, using
// the second-order-cone barrier -log((r_i + s)^2 - |y - c_i|^2).
Feasibility barrier_solve(const BallSystem& sys, double tolerance, int budget, VectorXd& y,
                          int& iterations) {
  const int d = sys.dim();
  const int m = sys.count();
  double s = sys.violation(y) + 0.5 * sys.scale;

  auto strictly_inside = [&](const VectorXd& yy, double ss) {
    for (int i = 0; i < m; ++i) {
      const double t = sys.radii[i] + ss;
      if (!(t > 0.0) || !((yy - sys.centers.col(i)).norm() < t)) return false;
    }
    return true;
  };
  auto objective = [&](const VectorXd& yy, double ss, double tau) {
    double f = tau * ss;
    for (int i = 0; i < m; ++i) {
      const double t = sys.radii[i] + ss;
      const double n = (yy - sys.centers.col(i)).norm();
      f -= std::log((t - n) * (t + n));
    }
    return f;
  };

  double tau = 2.0 * m / sys.scale;
  int steps = 0;
  while (steps < budget) {
    // Centering.
    for (int inner = 0; inner < 60 && steps < budget; ++inner) {
      VectorXd grad = VectorXd::Zero(d + 1);
      MatrixXd hess = MatrixXd::Zero(d + 1, d + 1);
      grad[d] = tau;
      for (int i = 0; i < m; ++i) {
        const VectorXd u = y - sys.centers.col(i);
        const double t = sys.radii[i] + s;
        const double n = u.norm();
        const double gap = (t - n) * (t + n);
        VectorXd a(d + 1);
        a.head(d) = -2.0 * u;
        a[d] = 2.0 * t;
        grad -= a / gap;
        hess.noalias() += (a * a.transpose()) / (gap * gap);
        hess.topLeftCorner(d, d).diagonal().array() += 2.0 / gap;
        hess(d, d) -= 2.0 / gap;
      }
      const VectorXd step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      ++steps;
      ++iterations;
      if (!std::isfinite(decrement) || decrement < 1e-14) {
        break;
      }
      double alpha = 1.0;
      const double f0 = objective(y, s, tau);
      bool moved = false;
      while (alpha > 1e-14) {
        const VectorXd y1 = y + alpha * step.head(d);
        const double s1 = s + alpha * step[d];
        if (strictly_inside(y1, s1) && objective(y1, s1, tau) <= f0 - 0.25 * alpha * decrement) {
          y = y1;
          s = s1;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (sys.violation(y) <= tolerance) {
        return Feasibility::Found;
      }
      if (!moved || decrement < 1e-10) {
        break;
      }
    }
    if (dual_lower_bound(sys, y, s, tau) > tolerance) {
      return Feasibility::Empty;
    }
    if (2.0 * m / tau < 1e-3 * std::numeric_limits<double>::epsilon() * sys.scale) {
      break;
    }
    tau *= 8.0;
  }
  return Feasibility::Undecided;
}

IntersectionOutcome intersect_vector_balls(std::span<const Ball> balls, double tolerance,
                                           const FeasibilityOptions& options) {
  const BallSystem sys = make_system(balls);
  if (pairwise_disjoint(sys, tolerance)) {
    return {Feasibility::Empty, std::nullopt, 0};
  }
  VectorXd y = sys.centers.rowwise().mean();
  if (options.warm_start) {
    const auto& w = options.warm_start->values;
    if (static_cast<int>(w.size()) != sys.dim()) {
      throw ContractViolation("warm start dimension does not match the balls");
    }
    y = Eigen::Map<const VectorXd>(w.data(), sys.dim());
  }
  int iterations = 0;
  if (cyclic_projections(sys, tolerance, options.max_projection_iterations, y, iterations)) {
    return {Feasibility::Found, to_point(y), iterations};
  }
  const Feasibility status =
      barrier_solve(sys, tolerance, options.max_newton_iterations, y, iterations);
  if (status == Feasibility::Found) {
    return {status, to_point(y), iterations};
  }
  return {status, std::nullopt, iterations};
}

}  // namespace

IntersectionOutcome intersect_suffix_balls(std::span<const Ball> balls, double tolerance,
                                           const FeasibilityOptions& options) {
  if (!(tolerance >= 0.0)) {
    throw ParameterError("intersection tolerance must be >= 0");
  }
  if (balls.empty()) {
    throw ParameterError("intersection of zero balls is not defined here");
  }
  const DistanceOracle oracle(metric_for(balls.front().center));
  for (const Ball& b : balls) {
    oracle.require_compatible(balls.front().center, b.center);
  }
  switch (oracle.kind()) {
    case MetricKind::AbsoluteDifference:
      return intersect_intervals(balls, tolerance);
    case MetricKind::Euclidean:
      return intersect_vector_balls(balls, tolerance, options);
    case MetricKind::TotalVariation:
      break;
  }
  throw CapabilityError(
      "ball intersection is not supported in total-variation space; use select_pairwise");
}

}  // namespace betafree
