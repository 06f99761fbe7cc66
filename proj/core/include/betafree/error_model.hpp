#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace betafree {

/// A non-decreasing bound f(beta) >= 0 on a base estimator's error when the
/// corruption bound beta is valid.
///
/// The generalized inverse is taken on the excess over the irreducible floor
/// f(0):
///
///     inverse_at(eps) = sup { beta in [0, beta_max] : f(beta) - f(0) <= eps }.
///
/// For models with f(0) = 0 this is the plain sup { f(beta) <= eps }. Models
/// with a sample-size floor (the calibrated trimmed-mean bound) would
/// otherwise have an empty level set for small eps.
class ErrorModel {
 public:
  using Function = std::function<double(double)>;

  /// `inverse`, when given, must return the excess inverse in closed form
  /// (unclipped); otherwise bisection is used.
  ErrorModel(std::string name, Function evaluate, Function inverse = {},
             std::optional<double> nuisance = std::nullopt);

  double operator()(double beta) const { return evaluate_(beta); }
  double evaluate(double beta) const { return evaluate_(beta); }

  /// f(0).
  double floor() const { return evaluate_(0.0); }

  double inverse_at(double epsilon, double beta_max) const;

  const std::string& name() const noexcept { return name_; }

  /// The plugged-in nuisance value for parameter-dependent models.
  std::optional<double> nuisance() const noexcept { return nuisance_; }

  /// f(beta) = beta.
  static ErrorModel identity();
  /// f(beta) = sqrt(beta).
  static ErrorModel sqrt_rate();
  /// f(beta) = beta * sqrt(log(1 / beta)), f(0) = 0. Non-decreasing on
  /// [0, e^{-1/2}], which covers every admissible beta_max < 1/2.
  static ErrorModel beta_sqrt_log();
  /// f(beta) = sigma * (a * sqrt(beta) + b / sqrt(n)), the calibrated bound
  /// for the trimmed mean.
  static ErrorModel trimmed_mean(double sigma, std::size_t n, double a = kTrimmedMeanA,
                                 double b = kTrimmedMeanB);

  /// Looks up identity | sqrt | beta-sqrt-log. Throws ParameterError.
  static ErrorModel by_name(std::string_view name);

  static constexpr double kTrimmedMeanA = 3.0;
  static constexpr double kTrimmedMeanB = 3.0;

 private:
  std::string name_;
  Function evaluate_;
  Function inverse_;
  std::optional<double> nuisance_;
};

/// True iff f is non-decreasing and nonnegative on `betas` (any order).
bool is_monotone_on(const ErrorModel& f, std::span<const double> betas);

/// True iff g(beta) >= f(beta) at every beta in `betas`.
bool dominates(const ErrorModel& g, const ErrorModel& f, std::span<const double> betas);

/// Error bounds f(beta, v) that depend on an unknown nuisance value v
/// derived from the estimated parameter p.
struct ParametricErrorFamily {
  std::string name;
  std::function<double(double beta, double nuisance)> evaluate;
  /// Maps the parameter p to the nuisance v(p).
  std::function<double(double p)> nuisance_of;

  /// f(beta, v) = sqrt(v * beta), with the nuisance given directly (v(p) = p).
  static ParametricErrorFamily sqrt_variance();

  /// Erdos-Renyi connection probability on `nodes` nodes, v(p) = p(1-p):
  /// f(beta, v) = beta sqrt(v log(1/beta) / n) + (beta / n) log n + sqrt(v log n) / n.
  static ParametricErrorFamily erdos_renyi(std::size_t nodes);

  /// f(., v(p)) as a plain model.
  ErrorModel at(double p) const;
};

/// Checks v(p_tilde) - v(p) in [0, slack].
bool satisfies_slack(const ParametricErrorFamily& family, double p, double p_tilde, double slack);

/// g(beta) = f(beta, v(weak_estimate)). Under the slack contract g bounds
/// the unknown f(beta, v(p)) from above. Throws ParameterError when f is not
/// non-decreasing in its nuisance over [v(weak_estimate) - slack,
/// v(weak_estimate)] or slack < 0.
ErrorModel plugin_error_model(double weak_estimate, double slack,
                              const ParametricErrorFamily& family);

}  // namespace betafree
