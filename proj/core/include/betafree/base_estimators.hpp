#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "betafree/dataset.hpp"
#include "betafree/error_model.hpp"
#include "betafree/metric.hpp"

namespace betafree {

/// Number of samples trimmed from each side for bound beta: ceil(beta * n),
/// with a 1e-9 guard so products like 0.05 * 10000 do not round up.
std::size_t trim_count(std::size_t n, double beta);

/// Sorts, drops trim_count(n, beta) samples from each end, averages the
/// rest. Throws ParameterError for beta outside [0, 1/2) or when nothing
/// would survive.
double trimmed_mean(const Dataset& data, double beta);

struct PruneResult {
  double mean = 0.0;
  std::size_t removed = 0;
};

inline constexpr double kDefaultStopFactor = 4.0;

/// Repeatedly drops the sample farthest from the running mean (ties drop the
/// larger value) until the mean squared deviation is <= c_stop * sigma^2.
/// A strict majority of the samples must survive; otherwise BreakdownError.
PruneResult variance_prune(const Dataset& data, double sigma, double c_stop = kDefaultStopFactor);

enum class AdversaryStrategy { Boundary, Random, Worst };

std::string_view to_string(AdversaryStrategy s) noexcept;

/// Synthetic estimator that saturates the estimation contract around a known
/// truth.
///
/// For beta >= alpha the output is within f(beta) of the truth:
///   Boundary: at distance f(beta) in a seeded direction (per beta).
///   Random:   uniform in the ball of radius f(beta).
///   Worst:    collinear along one seeded axis. beta == alpha sits on the +
///             side, larger betas on the - side.
/// For beta < alpha the contract allows anything:
///   Boundary / Random: 10 * f(beta_max) from the truth in a seeded direction
///                      (clamped to the simplex for pmfs).
///   Worst: a decoy at x_alpha + (f(alpha) + f(beta)) on the + axis, the
///          farthest point still pairwise-consistent with x_alpha.
/// With truth 1 then -1 on the grid {0.25, 1} and f = identity, Worst yields
/// the two-point instance x_0.25 = 1.25, x_1 = 0.
Point contract_adversary(const Point& truth, double alpha, double beta, const ErrorModel& f,
                         AdversaryStrategy strategy, std::uint64_t seed, double beta_max);

/// Beta-parametrized estimator invoked once per grid point by run_meta.
/// Implementations must tolerate concurrent calls on a shared dataset.
class BaseEstimator {
 public:
  virtual ~BaseEstimator() = default;
  virtual std::string name() const = 0;
  virtual Point estimate(const Dataset& data, double beta) const = 0;
};

class TrimmedMeanEstimator final : public BaseEstimator {
 public:
  std::string name() const override { return "trimmed-mean"; }
  Point estimate(const Dataset& data, double beta) const override {
    return Scalar{trimmed_mean(data, beta)};
  }
};

/// Ignores beta; its tuning parameter is the scale bound sigma.
class VariancePruneEstimator final : public BaseEstimator {
 public:
  VariancePruneEstimator(double sigma, double c_stop = kDefaultStopFactor)
      : sigma_(sigma), c_stop_(c_stop) {}
  std::string name() const override { return "variance-prune"; }
  Point estimate(const Dataset& data, double) const override {
    return Scalar{variance_prune(data, sigma_, c_stop_).mean};
  }

 private:
  double sigma_;
  double c_stop_;
};

/// contract_adversary behind the BaseEstimator interface; ignores the data.
class ContractAdversaryEstimator final : public BaseEstimator {
 public:
  ContractAdversaryEstimator(Point truth, double alpha, ErrorModel f, AdversaryStrategy strategy,
                             std::uint64_t seed, double beta_max)
      : truth_(std::move(truth)),
        alpha_(alpha),
        f_(std::move(f)),
        strategy_(strategy),
        seed_(seed),
        beta_max_(beta_max) {}
  std::string name() const override { return "contract-adversary"; }
  Point estimate(const Dataset&, double beta) const override {
    return contract_adversary(truth_, alpha_, beta, f_, strategy_, seed_, beta_max_);
  }

 private:
  Point truth_;
  double alpha_;
  ErrorModel f_;
  AdversaryStrategy strategy_;
  std::uint64_t seed_;
  double beta_max_;
};

}  // namespace betafree
