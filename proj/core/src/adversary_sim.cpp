#include "betafree/adversary_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "betafree/errors.hpp"
#include "betafree/rng.hpp"

namespace betafree {

double clean_mean(const CleanModel& model) noexcept {
  if (const auto* g = std::get_if<GaussianMean>(&model)) return g->mu;
  const auto& b = std::get<BernoulliPmf>(model);
  return b.support[0] + b.p * (b.support[1] - b.support[0]);
}

double clean_sigma(const CleanModel& model) noexcept {
  if (const auto* g = std::get_if<GaussianMean>(&model)) return g->sigma;
  const auto& b = std::get<BernoulliPmf>(model);
  return std::sqrt(b.p * (1.0 - b.p)) * std::abs(b.support[1] - b.support[0]);
}

std::size_t clean_count(std::size_t n, double alpha) {
  return static_cast<std::size_t>(std::floor((1.0 - alpha) * static_cast<double>(n) + 1e-9));
}

Dataset sample_contaminated(const Scenario& scenario) {
  if (scenario.n == 0) {
    throw ParameterError("scenario needs n >= 1");
  }
  if (!(scenario.alpha >= 0.0 && scenario.alpha < 0.5)) {
    throw ParameterError(fmt::format("scenario alpha must lie in [0, 1/2), got {}", scenario.alpha));
  }
  CounterRng rng(scenario.seed);
  const std::size_t clean = clean_count(scenario.n, scenario.alpha);
  std::vector<double> samples;
  samples.reserve(scenario.n);

  if (const auto* g = std::get_if<GaussianMean>(&scenario.clean)) {
    std::normal_distribution<double> normal(g->mu, g->sigma);
    for (std::size_t i = 0; i < clean; ++i) samples.push_back(normal(rng));
  } else {
    const auto& b = std::get<BernoulliPmf>(scenario.clean);
    for (std::size_t i = 0; i < clean; ++i) {
      samples.push_back(rng.uniform() < b.p ? b.support[1] : b.support[0]);
    }
  }

  double location = 0.0;
  if (const auto* pm = std::get_if<PointMass>(&scenario.contamination)) {
    location = pm->location;
  } else if (const auto* sp = std::get_if<SupportPoint>(&scenario.contamination)) {
    const auto* b = std::get_if<BernoulliPmf>(&scenario.clean);
    if (b == nullptr || sp->index > 1) {
      throw ParameterError("support-point contamination needs a Bernoulli clean model and "
                           "index 0 or 1");
    }
    location = b->support[sp->index];
  } else {
    const double mu = clean_mean(scenario.clean);
    const double empirical =
        clean > 0 ? std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(clean)
                  : mu;
    if (const auto* b = std::get_if<BernoulliPmf>(&scenario.clean)) {
      location = std::abs(b->support[0] - empirical) > std::abs(b->support[1] - empirical)
                     ? b->support[0]
                     : b->support[1];
    } else {
      const double side = empirical < mu ? -1.0 : 1.0;
      location = empirical + side * 10.0 * clean_sigma(scenario.clean);
    }
  }
  samples.resize(scenario.n, location);
  return Dataset(std::move(samples));
}

ConsistentInstance generate_consistent_instance(const DistanceOracle& oracle, const BetaGrid& grid,
                                                const ErrorModel& f, std::uint64_t seed,
                                                const InstanceShape& shape) {
  if (grid.betas.empty()) {
    throw ParameterError("grid is empty");
  }
  CounterRng rng(seed);
  Point truth;
  switch (oracle.kind()) {
    case MetricKind::AbsoluteDifference:
      truth = Scalar{rng.uniform(-10.0, 10.0)};
      break;
    case MetricKind::Euclidean: {
      std::vector<double> v(std::max<std::size_t>(shape.dimension, 1));
      for (double& x : v) x = rng.uniform(-10.0, 10.0);
      truth = Vector{std::move(v)};
      break;
    }
    case MetricKind::TotalVariation: {
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> w(std::max<std::size_t>(shape.support, 2));
      double total = 0.0;
      for (double& x : w) total += (x = expo(rng));
      for (double& x : w) x /= total;
      truth = Pmf(std::move(w));
      break;
    }
  }
  const auto pick = [&](std::size_t count) {
    return std::min(count - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(count)));
  };
  const double alpha = grid.betas[pick(grid.size())];
  const auto strategy = static_cast<AdversaryStrategy>(pick(3));
  const std::uint64_t adversary_seed = CounterRng::derive(seed, 1);

  std::vector<EstimateSeries::Entry> entries;
  entries.reserve(grid.size());
  for (double beta : grid.betas) {
    entries.push_back(
        {beta, contract_adversary(truth, alpha, beta, f, strategy, adversary_seed, grid.beta_max())});
  }
  return {std::move(truth), alpha, EstimateSeries(oracle, std::move(entries)), strategy};
}

bool is_consistent(const Point& truth, double alpha, const EstimateSeries& series,
                   const ErrorModel& f) {
  for (const auto& e : series.entries()) {
    if (e.beta >= alpha && series.oracle()(truth, e.estimate) > f(e.beta)) {
      return false;
    }
  }
  return true;
}

TwoParamInstance TwoParamInstance::textbook(double x00) {
  TwoParamInstance inst;
  inst.levels = {0.0, 1.0};
  inst.points = {{x00, 1.0}, {-1.0, 0.0}};
  inst.bounds = {{0.0, 0.0}, {0.0, 1.0}};
  inst.candidates = {{1.0, 0, 1}, {-1.0, 1, 0}};
  return inst;
}

void validate(const TwoParamInstance& inst) {
  const std::size_t k = inst.levels.size();
  if (k == 0) throw ParameterError("two-parameter instance has no levels");
  if (!std::is_sorted(inst.levels.begin(), inst.levels.end()) ||
      std::adjacent_find(inst.levels.begin(), inst.levels.end()) != inst.levels.end()) {
    throw ParameterError("levels must be strictly increasing");
  }
  auto square = [k](const std::vector<std::vector<double>>& m) {
    return m.size() == k &&
           std::all_of(m.begin(), m.end(), [k](const auto& row) { return row.size() == k; });
  };
  if (!square(inst.points) || !square(inst.bounds)) {
    throw ParameterError("points and bounds must be |levels| x |levels| tables");
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double f = inst.bounds[i][j];
      if (!(f >= 0.0) || (i > 0 && f < inst.bounds[i - 1][j]) ||
          (j > 0 && f < inst.bounds[i][j - 1])) {
        throw ParameterError(
            fmt::format("bound table is negative or decreasing at ({}, {})", i, j));
      }
    }
  }
  for (const auto& c : inst.candidates) {
    if (c.alpha1 >= k || c.alpha2 >= k) throw ParameterError("candidate level out of range");
  }
}

bool candidate_consistent(const TwoParamInstance& inst, const TruthCandidate& c) {
  for (std::size_t i = c.alpha1; i < inst.levels.size(); ++i) {
    for (std::size_t j = c.alpha2; j < inst.levels.size(); ++j) {
      if (std::abs(inst.points[i][j] - c.location) > inst.bounds[i][j]) return false;
    }
  }
  return true;
}

TwoParamVerdict verify_two_param_counterexample(const TwoParamInstance& inst, double c_max,
                                                std::size_t steps_per_unit, ScanRange range) {
  validate(inst);
  if (steps_per_unit == 0 || !(range.lo <= range.hi)) {
    throw ParameterError("scan needs steps_per_unit >= 1 and lo <= hi");
  }
  const double steps = static_cast<double>(steps_per_unit);
  const auto k_lo = static_cast<long long>(std::ceil(range.lo * steps));
  const auto k_hi = static_cast<long long>(std::floor(range.hi * steps));
  std::optional<long long> first;
  std::optional<long long> last;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double x = static_cast<double>(k) / steps;
    const bool ok = std::all_of(inst.candidates.begin(), inst.candidates.end(), [&](const auto& c) {
      return std::abs(x - c.location) <= c_max * inst.bounds[c.alpha1][c.alpha2];
    });
    if (ok) {
      if (!first) first = k;
      last = k;
    }
  }
  if (!first) {
    return {false, std::nullopt};
  }
  // Feasible sets are intervals, so the midpoint index is feasible too.
  const long long mid = *first + (*last - *first) / 2;
  return {true, static_cast<double>(mid) / steps};
}

MeanVarianceReport verify_mean_variance_impossibility(double epsilon, double C, std::size_t n,
                                                      std::size_t trials, std::uint64_t seed) {
  if (!(epsilon > 0.0) || !(C > 0.0) || n == 0 || n % 10 != 0) {
    throw ParameterError("mean/variance check needs epsilon > 0, C > 0 and n divisible by 10");
  }
  MeanVarianceReport r;
  r.epsilon = epsilon;
  r.c = C;
  r.n = n;
  const double spike = 21.0 * epsilon;
  const std::size_t tenth = n / 10;

  // World 1: every genuine sample is 0; the adversary rewrites a tenth of
  // them to 21 epsilon.
  r.world1_sample.assign(n, 0.0);
  for (std::size_t i = 0; i < tenth; ++i) r.world1_sample[i * 10] = spike;
  r.world1_alpha = static_cast<double>(tenth) / static_cast<double>(n);
  r.world1_mean = 0.0;
  // World 2: exact 9/10 : 1/10 proportions, nothing corrupted.
  r.world2_sample.assign(n - tenth, 0.0);
  r.world2_sample.resize(n, spike);
  r.world2_mean = 0.1 * spike;
  r.world2_sigma = std::sqrt(0.1 * 0.9) * spike;

  std::vector<double> a = r.world1_sample;
  std::vector<double> b = r.world2_sample;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  r.samples_identical = a == b;

  r.world1_target = C * 0.0 * std::sqrt(r.world1_alpha) + epsilon;
  r.world2_target = C * r.world2_sigma * std::sqrt(0.0) + epsilon;

  auto serves_both = [&](double x) {
    return std::abs(x - r.world1_mean) <= r.world1_target &&
           std::abs(x - r.world2_mean) <= r.world2_target;
  };

  constexpr int kScan = 10'000;
  r.world2_error_floor = std::numeric_limits<double>::infinity();
  for (int k = -kScan; k <= kScan; ++k) {
    const double x = r.world1_mean + r.world1_target * k / kScan;
    r.world2_error_floor = std::min(r.world2_error_floor, std::abs(r.world2_mean - x));
  }
  r.best_overshoot = std::numeric_limits<double>::infinity();
  for (int k = -5 * kScan; k <= 5 * kScan; ++k) {
    const double x = epsilon * k / kScan;
    const double over = std::max(std::abs(x - r.world1_mean) - r.world1_target,
                                 std::abs(x - r.world2_mean) - r.world2_target);
    r.best_overshoot = std::min(r.best_overshoot, over);
  }

  // Every estimator sees the same sample, so it outputs the same x_hat in
  // both worlds.
  const Dataset shared(r.world1_sample);
  std::vector<double> outputs;
  outputs.push_back(std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n));
  outputs.push_back(a[n / 2]);
  for (double beta : {0.05, 0.1, 0.15, 0.2, 0.3, 0.45}) {
    if (2 * trim_count(n, beta) < n) outputs.push_back(trimmed_mean(shared, beta));
  }
  for (double sigma : {0.0, epsilon, r.world2_sigma}) {
    try {
      outputs.push_back(variance_prune(shared, sigma).mean);
    } catch (const BreakdownError&) {
    }
  }
  CounterRng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) outputs.push_back(rng.uniform(-3.0, 5.0) * epsilon);

  r.candidates_tested = outputs.size();
  r.candidates_satisfying_both =
      static_cast<std::size_t>(std::count_if(outputs.begin(), outputs.end(), serves_both));
  return r;
}

}  // namespace betafree
