#include "betafree/error_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "betafree/errors.hpp"

namespace betafree {

ErrorModel::ErrorModel(std::string name, Function evaluate, Function inverse,
                       std::optional<double> nuisance)
    : name_(std::move(name)),
      evaluate_(std::move(evaluate)),
      inverse_(std::move(inverse)),
      nuisance_(nuisance) {
  if (!evaluate_) {
    throw ParameterError("error model needs an evaluation function");
  }
}

double ErrorModel::inverse_at(double epsilon, double beta_max) const {
  if (!(beta_max > 0.0)) {
    throw ParameterError("inverse_at needs beta_max > 0");
  }
  const double base = floor();
  if (inverse_) {
    return std::clamp(inverse_(epsilon), 0.0, beta_max);
  }
  if (evaluate_(beta_max) - base <= epsilon) {
    return beta_max;
  }
  // Invariant: f(lo) - f(0) <= eps < f(hi) - f(0).
  double lo = 0.0;
  double hi = beta_max;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // underflow near zero
    if (evaluate_(mid) - base <= epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

ErrorModel ErrorModel::identity() {
  return ErrorModel(
      "identity", [](double b) { return b; }, [](double eps) { return eps; });
}

ErrorModel ErrorModel::sqrt_rate() {
  return ErrorModel(
      "sqrt", [](double b) { return b > 0.0 ? std::sqrt(b) : 0.0; },
      [](double eps) { return eps > 0.0 ? eps * eps : 0.0; });
}

ErrorModel ErrorModel::beta_sqrt_log() {
  return ErrorModel("beta-sqrt-log", [](double b) {
    if (b <= 0.0) return 0.0;
    if (b >= 1.0) return 0.0;
    return b * std::sqrt(std::log(1.0 / b));
  });
}

ErrorModel ErrorModel::trimmed_mean(double sigma, std::size_t n, double a, double b) {
  if (!(sigma >= 0.0) || n == 0 || !(a > 0.0) || !(b >= 0.0)) {
    throw ParameterError("trimmed-mean error model needs sigma >= 0, n >= 1, a > 0, b >= 0");
  }
  const double floor_term = sigma * b / std::sqrt(static_cast<double>(n));
  const double slope = sigma * a;
  auto inverse = [slope](double eps) {
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    const double r = eps / slope;
    return r > 0.0 ? r * r : 0.0;
  };
  return ErrorModel(
      fmt::format("trimmed-mean(sigma={}, n={})", sigma, n),
      [slope, floor_term](double beta) {
        return slope * (beta > 0.0 ? std::sqrt(beta) : 0.0) + floor_term;
      },
      inverse);
}

ErrorModel ErrorModel::by_name(std::string_view name) {
  if (name == "identity") return identity();
  if (name == "sqrt") return sqrt_rate();
  if (name == "beta-sqrt-log" || name == "beta_sqrt_log") return beta_sqrt_log();
  throw ParameterError(fmt::format("unknown error model '{}'", name));
}

bool is_monotone_on(const ErrorModel& f, std::span<const double> betas) {
  std::vector<double> sorted(betas.begin(), betas.end());
  std::sort(sorted.begin(), sorted.end());
  double previous = -std::numeric_limits<double>::infinity();
  for (double b : sorted) {
    const double v = f(b);
    if (!(v >= 0.0) || v < previous) {
      return false;
    }
    previous = v;
  }
  return true;
}

bool dominates(const ErrorModel& g, const ErrorModel& f, std::span<const double> betas) {
  return std::all_of(betas.begin(), betas.end(), [&](double b) { return g(b) >= f(b); });
}

ParametricErrorFamily ParametricErrorFamily::sqrt_variance() {
  return {"sqrt-variance",
          [](double beta, double v) { return std::sqrt(std::max(0.0, v * beta)); },
          [](double p) { return p; }};
}

ParametricErrorFamily ParametricErrorFamily::erdos_renyi(std::size_t nodes) {
  if (nodes < 2) {
    throw ParameterError("erdos-renyi family needs at least 2 nodes");
  }
  const double n = static_cast<double>(nodes);
  const double log_n = std::log(n);
  return {fmt::format("erdos-renyi(n={})", nodes),
          [n, log_n](double beta, double v) {
            v = std::max(0.0, v);
            double corrupt = 0.0;
            if (beta > 0.0 && beta < 1.0) {
              corrupt = beta * std::sqrt(v * std::log(1.0 / beta) / n) + beta * log_n / n;
            }
            return corrupt + std::sqrt(v * log_n) / n;
          },
          [](double p) { return p * (1.0 - p); }};
}

ErrorModel ParametricErrorFamily::at(double p) const {
  const double v = nuisance_of(p);
  auto fn = evaluate;
  return ErrorModel(fmt::format("{}[v={}]", name, v), [fn, v](double beta) { return fn(beta, v); },
                    {}, v);
}

bool satisfies_slack(const ParametricErrorFamily& family, double p, double p_tilde, double slack) {
  const double excess = family.nuisance_of(p_tilde) - family.nuisance_of(p);
  return excess >= 0.0 && excess <= slack;
}

ErrorModel plugin_error_model(double weak_estimate, double slack,
                              const ParametricErrorFamily& family) {
  if (!(slack >= 0.0)) {
    throw ParameterError("plug-in slack must be >= 0");
  }
  if (!family.evaluate || !family.nuisance_of) {
    throw ParameterError("parametric family is incomplete");
  }
  const double v_hi = family.nuisance_of(weak_estimate);
  const double v_lo = v_hi - slack;
  // f(beta, .) must not decrease from v_lo to v_hi, or the plug-in value
  // would not dominate the unknown truth.
  constexpr std::array<double, 8> kProbe = {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.49};
  constexpr int kSteps = 16;
  for (double beta : kProbe) {
    double previous = family.evaluate(beta, v_lo);
    for (int k = 1; k <= kSteps; ++k) {
      const double v = v_lo + (v_hi - v_lo) * k / kSteps;
      const double current = family.evaluate(beta, v);
      if (current < previous) {
        throw ParameterError(fmt::format(
            "family {} is not non-decreasing in its nuisance near v={} (beta={})", family.name, v,
            beta));
      }
      previous = current;
    }
  }
  ErrorModel g = family.at(weak_estimate);
  return ErrorModel(fmt::format("plugin({})", g.name()),
                    [g](double beta) { return g(beta); }, {}, v_hi);
}

}  // namespace betafree
