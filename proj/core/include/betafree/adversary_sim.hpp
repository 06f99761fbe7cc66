#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "betafree/base_estimators.hpp"
#include "betafree/beta_grid.hpp"
#include "betafree/dataset.hpp"
#include "betafree/error_model.hpp"
#include "betafree/metric.hpp"
#include "betafree/selectors.hpp"

namespace betafree {

// ---------------------------------------------------------------------------
// Huber-contaminated sampling

struct GaussianMean {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Two-point distribution: support[1] with probability p, else support[0].
struct BernoulliPmf {
  double p = 0.5;
  std::array<double, 2> support{0.0, 1.0};
};

using CleanModel = std::variant<GaussianMean, BernoulliPmf>;

struct PointMass {
  double location = 0.0;
};
/// All corruptions at one support point of a BernoulliPmf clean model.
struct SupportPoint {
  std::size_t index = 0;
};
/// Reads the clean draws, then places every corruption at
/// empirical_mean + 10 sigma on the side the empirical mean already leans
/// (upwards on a tie).
struct AdaptiveWorst {};

using Contamination = std::variant<PointMass, SupportPoint, AdaptiveWorst>;

struct Scenario {
  std::string id;
  CleanModel clean;
  double alpha = 0.0;
  Contamination contamination = AdaptiveWorst{};
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

double clean_mean(const CleanModel& model) noexcept;
double clean_sigma(const CleanModel& model) noexcept;

/// floor((1 - alpha) n), with a 1e-9 guard against products like
/// 0.95 * 10000 landing a hair below an integer.
std::size_t clean_count(std::size_t n, double alpha);

/// n samples: clean_count draws from the clean model followed by the
/// corruptions. Throws ParameterError for alpha outside [0, 1/2) or n == 0.
Dataset sample_contaminated(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Consistent instances for the selector property tests

struct ConsistentInstance {
  Point truth;
  double alpha = 0.0;
  EstimateSeries series;
  AdversaryStrategy strategy = AdversaryStrategy::Boundary;
};

struct InstanceShape {
  std::size_t dimension = 2;  ///< Euclidean points
  std::size_t support = 4;    ///< Pmf points
};

/// Draws a truth and alpha uniformly from the grid, then fills x_beta with
/// contract_adversary under a seed-chosen strategy. The result satisfies
/// d(truth, x_beta) <= f(beta) for every beta >= alpha.
ConsistentInstance generate_consistent_instance(const DistanceOracle& oracle, const BetaGrid& grid,
                                                const ErrorModel& f, std::uint64_t seed,
                                                const InstanceShape& shape = {});

/// Post-hoc audit of the consistency predicate.
bool is_consistent(const Point& truth, double alpha, const EstimateSeries& series,
                   const ErrorModel& f);

// ---------------------------------------------------------------------------
// Two-parameter counterexample

struct TruthCandidate {
  double location = 0.0;
  /// Indices into TwoParamInstance::levels.
  std::size_t alpha1 = 0;
  std::size_t alpha2 = 0;
};

/// Points x[i][j] = x_{levels[i], levels[j]} on the reals with bound table
/// f[i][j], plus the truths a selector would have to serve simultaneously.
struct TwoParamInstance {
  std::vector<double> levels;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> bounds;
  std::vector<TruthCandidate> candidates;

  /// levels {0, 1}; x_{1,1} = 0, x_{0,1} = 1, x_{1,0} = -1, x_{0,0} free;
  /// f(1,1) = 1 and 0 elsewhere; truths 1 at (0,1) and -1 at (1,0).
  static TwoParamInstance textbook(double x00 = 0.0);
};

/// Throws ParameterError on shape mismatch, unsorted levels, or a bound
/// table that is negative or decreasing in either argument.
void validate(const TwoParamInstance& instance);

/// d(x_{b1,b2}, x) <= f(b1,b2) for every b1 >= alpha1, b2 >= alpha2.
bool candidate_consistent(const TwoParamInstance& instance, const TruthCandidate& candidate);

struct ScanRange {
  double lo = -3.0;
  double hi = 3.0;
};

struct TwoParamVerdict {
  bool feasible = false;
  /// Midpoint of the feasible scan points when feasible.
  std::optional<double> point;
};

/// Brute-force scan of x_hat = k / steps_per_unit over `range`: feasible iff
/// some x_hat has |x_hat - x| <= c_max * f(alpha1, alpha2) for every truth
/// candidate.
TwoParamVerdict verify_two_param_counterexample(const TwoParamInstance& instance, double c_max,
                                                std::size_t steps_per_unit = 10'000,
                                                ScanRange range = {});

// ---------------------------------------------------------------------------
// Mean / variance impossibility

struct MeanVarianceReport {
  double epsilon = 0.0;
  double c = 0.0;
  std::size_t n = 0;

  /// World 1: point mass at 0 with an adversary holding a 1/10 fraction.
  std::vector<double> world1_sample;
  /// World 2: 9/10 at 0, 1/10 at 21 epsilon, no corruption.
  std::vector<double> world2_sample;
  bool samples_identical = false;

  double world1_mean = 0.0;
  double world2_mean = 0.0;
  double world1_alpha = 0.0;
  double world2_sigma = 0.0;
  /// C sigma sqrt(alpha) + epsilon in each world; both equal epsilon.
  double world1_target = 0.0;
  double world2_target = 0.0;

  /// min over x_hat <= world1_target of |world2_mean - x_hat|; 1.1 epsilon.
  double world2_error_floor = 0.0;
  /// min over scanned x_hat of the larger target overshoot; > 0 means no
  /// output serves both worlds.
  double best_overshoot = 0.0;

  std::size_t candidates_tested = 0;
  std::size_t candidates_satisfying_both = 0;

  bool impossibility_holds() const noexcept {
    return samples_identical && best_overshoot > 0.0 && candidates_satisfying_both == 0;
  }
};

/// Builds both worlds on the same n (divisible by 10) samples and evaluates
/// the usual estimators plus `trials` seeded random outputs against both
/// error targets. Throws ParameterError unless epsilon > 0, C > 0 and
/// 10 | n.
MeanVarianceReport verify_mean_variance_impossibility(double epsilon, double C, std::size_t n,
                                                      std::size_t trials,
                                                      std::uint64_t seed = 0x5eed);

}  // namespace betafree
