#include "betafree/verify_suites.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>

#include <fmt/format.h>

#include "betafree/adversary_sim.hpp"
#include "betafree/rng.hpp"
#include "betafree/selectors.hpp"

namespace betafree {

std::optional<Suite> suite_from_string(std::string_view name) noexcept {
  if (name == "lemma2") return Suite::Factor2;
  if (name == "lemma3") return Suite::Factor3;
  if (name == "lemma_lb") return Suite::LowerBound;
  if (name == "two_param") return Suite::TwoParam;
  if (name == "mean_var") return Suite::MeanVar;
  return std::nullopt;
}

std::string_view to_string(Suite suite) noexcept {
  switch (suite) {
    case Suite::Factor2: return "lemma2";
    case Suite::Factor3: return "lemma3";
    case Suite::LowerBound: return "lemma_lb";
    case Suite::TwoParam: return "two_param";
    case Suite::MeanVar: return "mean_var";
  }
  return "unknown";
}

FamilyDraw draw_family(std::uint64_t seed, std::span<const MetricKind> metrics) {
  CounterRng rng(CounterRng::derive(seed, 0xFA));
  FamilyDraw draw;
  draw.metric = metrics[static_cast<std::size_t>(rng.uniform() * metrics.size()) % metrics.size()];
  const int model = static_cast<int>(rng.uniform() * 3.0) % 3;
  draw.f = model == 0 ? ErrorModel::identity()
                      : model == 1 ? ErrorModel::sqrt_rate() : ErrorModel::beta_sqrt_log();
  const auto length = 1 + static_cast<int>(rng.uniform() * 49.0);
  const double beta_max = rng.uniform(0.05, 0.49);
  // Keep the smallest beta above 1e-9 so f stays well resolved.
  const double theta_cap = std::min(3.0, std::pow(beta_max / 1e-9, 1.0 / std::max(1, length - 1)));
  const double theta = rng.uniform(1.02, theta_cap);
  const double last = beta_max / std::pow(theta, length - 1);
  const double epsilon = std::max(draw.f(last) - draw.f.floor(), 1e-300);
  draw.grid = build_beta_grid(beta_max, theta, epsilon, draw.f);
  return draw;
}

namespace {

constexpr std::array kIntersectionMetrics = {MetricKind::AbsoluteDifference, MetricKind::Euclidean};
constexpr std::array kAllMetrics = {MetricKind::AbsoluteDifference, MetricKind::Euclidean,
                                    MetricKind::TotalVariation};

SuiteReport factor_suite(Suite suite, const SuiteOptions& options) {
  const bool pairwise = suite == Suite::Factor3;
  const double factor = pairwise ? 3.0 : 2.0;
  SuiteReport report{suite, true, {}, std::nullopt};
  std::size_t violations = 0;
  std::size_t dominance = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < options.instances; ++i) {
    const std::uint64_t seed = options.seed_base + i;
    const FamilyDraw draw = pairwise ? draw_family(seed, kAllMetrics)
                                     : draw_family(seed, kIntersectionMetrics);
    const DistanceOracle oracle(draw.metric);
    const auto inst = generate_consistent_instance(oracle, draw.grid, draw.f, seed);
    double tol = 0.0;
    SelectionResult sel;
    if (pairwise) {
      sel = select_pairwise(inst.series, draw.f);
    } else {
      tol = default_tolerance(inst.series, draw.f);
      sel = select_intersection(inst.series, draw.f, tol);
    }
    const double err = oracle(sel.estimate, inst.truth);
    const double bound = factor * draw.f(inst.alpha) + 2.0 * tol;
    const double fa = draw.f(inst.alpha);
    if (fa > 0.0) worst_ratio = std::max(worst_ratio, err / fa);
    const bool ok = err <= bound;
    if (!ok) ++violations;
    if (sel.chosen_beta > inst.alpha) ++dominance;
    if ((!ok || sel.chosen_beta > inst.alpha) && !report.failing_seed) {
      report.failing_seed = seed;
      report.lines.push_back(fmt::format(
          "first failure: seed={} metric={} f={} |grid|={} alpha={:.17g} chosen={:.17g} "
          "error={:.17g} bound={:.17g}",
          seed, to_string(draw.metric), draw.f.name(), draw.grid.size(), inst.alpha,
          sel.chosen_beta, err, bound));
    }
  }
  report.passed = violations == 0 && dominance == 0;
  report.lines.insert(
      report.lines.begin(),
      fmt::format("{} instances, {} bound violations, {} chosen-beta > alpha, worst error/f(alpha) "
                  "= {:.6f} (limit {})",
                  options.instances, violations, dominance, worst_ratio, factor));
  return report;
}

SuiteReport lower_bound_suite() {
  SuiteReport report{Suite::LowerBound, true, {}, std::nullopt};
  for (double eps : {0.5, 0.25, 0.1}) {
    // Brute-force x_hat over [-3, 3] at 1e-4 spacing.
    double best = std::numeric_limits<double>::infinity();
    for (long k = -30'000; k <= 30'000; ++k) {
      const double x = static_cast<double>(k) * 1e-4;
      best = std::min(best, std::max(std::abs(x - 1.0) / eps, std::abs(x + 1.0)));
    }
    const double floor = 2.0 / (1.0 + eps);
    const EstimateSeries series(DistanceOracle(MetricKind::AbsoluteDifference),
                                {{eps, Scalar{1.0 + eps}}, {1.0, Scalar{0.0}}});
    const auto sel = select_intersection(series, ErrorModel::identity(), 0.0);
    const double x = std::get<Scalar>(sel.estimate).value;
    const double ratio_near = std::abs(x - 1.0) / eps;
    const double ratio_far = std::abs(x + 1.0) / 1.0;
    const bool ok = best >= floor && ratio_near <= 2.0 && ratio_far <= 2.0;
    report.passed = report.passed && ok;
    report.lines.push_back(fmt::format(
        "eps={}: min over x_hat of max ratio = {:.6f} >= 2/(1+eps) = {:.6f}; intersection x'={} "
        "ratios {:.4f} (x=1, alpha=eps), {:.4f} (x=-1, alpha=1) {}",
        eps, best, floor, x, ratio_near, ratio_far, ok ? "ok" : "FAIL"));
  }
  return report;
}

SuiteReport two_param_suite() {
  SuiteReport report{Suite::TwoParam, true, {}, std::nullopt};
  for (double x00 : {0.0, 5.0, -2.0}) {
    const auto inst = TwoParamInstance::textbook(x00);
    const bool consistent = std::all_of(inst.candidates.begin(), inst.candidates.end(),
                                        [&](const auto& c) { return candidate_consistent(inst, c); });
    for (double c : {1.0, 2.0, 10.0, 1000.0}) {
      const auto verdict = verify_two_param_counterexample(inst, c);
      const bool ok = consistent && !verdict.feasible;
      report.passed = report.passed && ok;
      report.lines.push_back(fmt::format("x00={} c_max={}: {} {}", x00, c,
                                         verdict.feasible ? "Feasible" : "Infeasible",
                                         ok ? "ok" : "FAIL"));
    }
  }
  return report;
}

SuiteReport mean_var_suite() {
  SuiteReport report{Suite::MeanVar, true, {}, std::nullopt};
  for (double eps : {0.01, 0.1, 1.0}) {
    const auto r = verify_mean_variance_impossibility(eps, 10.0, 1000, 1000);
    const bool floor_ok = std::abs(r.world2_error_floor - 1.1 * eps) <= 1e-12 * eps + 1e-15;
    const bool ok = r.impossibility_holds() && floor_ok;
    report.passed = report.passed && ok;
    report.lines.push_back(fmt::format(
        "eps={}: identical samples={}, world-2 error floor {:.6g} (1.1 eps = {:.6g}), best "
        "overshoot {:.6g}, {} of {} candidates serve both worlds {}",
        eps, r.samples_identical, r.world2_error_floor, 1.1 * eps, r.best_overshoot,
        r.candidates_satisfying_both, r.candidates_tested, ok ? "ok" : "FAIL"));
  }
  return report;
}

}  // namespace

SuiteReport run_suite(Suite suite, const SuiteOptions& options) {
  switch (suite) {
    case Suite::Factor2:
    case Suite::Factor3: return factor_suite(suite, options);
    case Suite::LowerBound: return lower_bound_suite();
    case Suite::TwoParam: return two_param_suite();
    case Suite::MeanVar: return mean_var_suite();
  }
  return {};
}

}  // namespace betafree
