#include "betafree/base_estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "betafree/errors.hpp"
#include "betafree/rng.hpp"

namespace betafree {

std::size_t trim_count(std::size_t n, double beta) {
  return static_cast<std::size_t>(std::ceil(beta * static_cast<double>(n) - 1e-9));
}

double trimmed_mean(const Dataset& data, double beta) {
  if (!(beta >= 0.0 && beta < 0.5)) {
    throw ParameterError(fmt::format("trimmed mean needs beta in [0, 1/2), got {}", beta));
  }
  const std::size_t n = data.size();
  const std::size_t k = trim_count(n, beta);
  if (2 * k >= n) {
    throw ParameterError(
        fmt::format("trimming {} from each side of {} samples leaves nothing", k, n));
  }
  const auto sorted = data.sorted();
  double sum = 0.0;
  for (std::size_t i = k; i < n - k; ++i) sum += sorted[i];
  return sum / static_cast<double>(n - 2 * k);
}

PruneResult variance_prune(const Dataset& data, double sigma, double c_stop) {
  if (!(sigma >= 0.0) || !(c_stop > 0.0)) {
    throw ParameterError("variance prune needs sigma >= 0 and c_stop > 0");
  }
  const auto sorted = data.sorted();
  const std::size_t n = sorted.size();
  const double threshold = c_stop * sigma * sigma;
  // The farthest survivor from the mean is always one of the two extremes.
  std::size_t lo = 0;
  std::size_t hi = n;  // survivors are sorted[lo, hi)
  while (true) {
    const double count = static_cast<double>(hi - lo);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += sorted[i];
    const double mean = sum / count;
    double sq = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sq += (sorted[i] - mean) * (sorted[i] - mean);
    if (sq / count <= threshold) {
      return {mean, n - (hi - lo)};
    }
    const std::size_t removed = n - (hi - lo) + 1;
    if (2 * removed >= n) {
      throw BreakdownError(fmt::format(
          "variance prune would remove {} of {} samples without reaching MSD <= {}", removed, n,
          threshold));
    }
    if (sorted[hi - 1] - mean >= mean - sorted[lo]) {
      --hi;
    } else {
      ++lo;
    }
  }
}

std::string_view to_string(AdversaryStrategy s) noexcept {
  switch (s) {
    case AdversaryStrategy::Boundary: return "boundary";
    case AdversaryStrategy::Random: return "random";
    case AdversaryStrategy::Worst: return "worst";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kAxisTag = 0xA715;

bool same_beta(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

std::vector<double> random_unit(CounterRng& rng, std::size_t d) {
  std::normal_distribution<double> normal;
  std::vector<double> u(d);
  double len = 0.0;
  while (!(len > 1e-12)) {
    len = 0.0;
    for (double& x : u) {
      x = normal(rng);
      len += x * x;
    }
    len = std::sqrt(len);
  }
  for (double& x : u) x /= len;
  return u;
}

// Shrinks the step until the computed distance respects the radius, so the
// contract holds in floating point and not only in exact arithmetic. Vector
// and pmf distances round differently depending on summation order, so those
// start a relative 1e-12 inside the sphere; any sane evaluation then agrees.
Point within_radius(const Point& truth, double radius, const std::function<Point(double)>& at) {
  const DistanceOracle oracle(metric_for(truth));
  double scale = std::holds_alternative<Scalar>(truth) ? 1.0 : 1.0 - 1e-12;
  Point p = at(scale);
  for (int k = 0; oracle(p, truth) > radius; ++k) {
    scale *= 1.0 - std::ldexp(1.0, std::min(-50 + k, -1));
    p = at(scale);
  }
  return p;
}

Point offset_point(const Point& truth, const std::vector<double>& dir, double length) {
  if (const auto* s = std::get_if<Scalar>(&truth)) {
    return Scalar{s->value + dir[0] * length};
  }
  auto values = std::get<Vector>(truth).values;
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += dir[i] * length;
  return Vector{std::move(values)};
}

// Scalars and vectors share the geometry; dir is a unit vector of the right
// dimension (+-1 for scalars).
Point euclidean_adversary(const Point& truth, double alpha, double beta, const ErrorModel& f,
                          AdversaryStrategy strategy, std::uint64_t seed, double beta_max) {
  const std::size_t d = dimension(truth);
  const bool scalar = std::holds_alternative<Scalar>(truth);
  CounterRng rng(CounterRng::derive(seed, std::bit_cast<std::uint64_t>(beta)));
  const double radius = f(beta);

  auto seeded_direction = [&]() {
    if (scalar) return std::vector<double>{rng.uniform() < 0.5 ? -1.0 : 1.0};
    return random_unit(rng, d);
  };
  auto axis = [&]() {
    if (scalar) return std::vector<double>{1.0};
    CounterRng axis_rng(CounterRng::derive(seed, kAxisTag));
    return random_unit(axis_rng, d);
  };

  if (beta < alpha && !same_beta(beta, alpha)) {
    if (strategy == AdversaryStrategy::Worst) {
      const Point anchor =
          euclidean_adversary(truth, alpha, alpha, f, strategy, seed, beta_max);
      return offset_point(anchor, axis(), f(alpha) + radius);
    }
    return offset_point(truth, seeded_direction(), 10.0 * f(beta_max));
  }

  switch (strategy) {
    case AdversaryStrategy::Boundary: {
      const auto dir = seeded_direction();
      return within_radius(truth, radius,
                           [&](double s) { return offset_point(truth, dir, radius * s); });
    }
    case AdversaryStrategy::Random: {
      const auto dir = seeded_direction();
      const double length = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      return within_radius(truth, radius,
                           [&](double s) { return offset_point(truth, dir, length * s); });
    }
    case AdversaryStrategy::Worst: {
      auto dir = axis();
      if (!same_beta(beta, alpha)) {
        for (double& x : dir) x = -x;
      }
      return within_radius(truth, radius,
                           [&](double s) { return offset_point(truth, dir, radius * s); });
    }
  }
  return truth;
}

Point pmf_mix(const std::vector<double>& p, std::size_t vertex, double lambda) {
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = (1.0 - lambda) * p[i] + (i == vertex ? lambda : 0.0);
  }
  return Pmf(std::move(q));
}

// Moves `amount` of mass from `from` to `to`, capped by what `from` holds.
Point pmf_shift(const std::vector<double>& p, std::size_t from, std::size_t to, double amount) {
  const double moved = std::min(amount, p[from]);
  std::vector<double> q = p;
  q[from] = moved == p[from] ? 0.0 : p[from] - moved;
  q[to] = p[to] + moved;
  return Pmf(std::move(q));
}

Point pmf_adversary(const Pmf& truth, double alpha, double beta, const ErrorModel& f,
                    AdversaryStrategy strategy, std::uint64_t seed, double beta_max) {
  const auto& p = truth.probabilities();
  const std::size_t k = p.size();
  if (k == 1) {
    return truth;
  }
  const double radius = f(beta);
  CounterRng rng(CounterRng::derive(seed, std::bit_cast<std::uint64_t>(beta)));
  auto pick = [&](CounterRng& r) {
    return static_cast<std::size_t>(r.uniform() * static_cast<double>(k)) % k;
  };
  // Worst uses one fixed pair of support points as its axis.
  CounterRng axis_rng(CounterRng::derive(seed, kAxisTag));
  const std::size_t plus = pick(axis_rng);
  const std::size_t minus = k > 1 ? (plus + 1 + pick(axis_rng) % (k - 1)) % k : plus;

  // Mixing toward vertex j moves lambda * (1 - p_j) total variation.
  auto toward_vertex = [&](std::size_t j, double tv) -> Point {
    const double reach = 1.0 - p[j];
    if (reach <= 0.0) return truth;
    const double lambda = std::min(1.0, tv / reach);
    return pmf_mix(p, j, lambda);
  };

  if (beta < alpha && !same_beta(beta, alpha)) {
    if (strategy == AdversaryStrategy::Worst) {
      const auto anchor = std::get<Pmf>(
          pmf_adversary(truth, alpha, alpha, f, strategy, seed, beta_max));
      return pmf_shift(anchor.probabilities(), minus, plus, f(alpha) + radius);
    }
    const std::size_t far = static_cast<std::size_t>(
        std::min_element(p.begin(), p.end()) - p.begin());
    return toward_vertex(far, 10.0 * f(beta_max));
  }

  switch (strategy) {
    case AdversaryStrategy::Boundary: {
      const std::size_t j = pick(rng);
      return within_radius(truth, radius, [&](double s) { return toward_vertex(j, radius * s); });
    }
    case AdversaryStrategy::Random: {
      const std::size_t j = pick(rng);
      const double tv = radius * rng.uniform();
      return within_radius(truth, radius, [&](double s) { return toward_vertex(j, tv * s); });
    }
    case AdversaryStrategy::Worst: {
      const bool positive = same_beta(beta, alpha);
      return within_radius(truth, radius, [&](double s) {
        return positive ? pmf_shift(p, minus, plus, radius * s)
                        : pmf_shift(p, plus, minus, radius * s);
      });
    }
  }
  return truth;
}

}  // namespace

Point contract_adversary(const Point& truth, double alpha, double beta, const ErrorModel& f,
                         AdversaryStrategy strategy, std::uint64_t seed, double beta_max) {
  if (!(alpha > 0.0 && alpha <= beta_max) || !(beta > 0.0 && beta <= beta_max)) {
    throw ParameterError(fmt::format(
        "contract adversary needs alpha, beta in (0, beta_max={}], got alpha={}, beta={}",
        beta_max, alpha, beta));
  }
  if (const auto* pmf = std::get_if<Pmf>(&truth)) {
    return pmf_adversary(*pmf, alpha, beta, f, strategy, seed, beta_max);
  }
  return euclidean_adversary(truth, alpha, beta, f, strategy, seed, beta_max);
}

}  // namespace betafree
