// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check recomputes its verdict with code local to this file
// (distances, grids, covers, brute-force scans) rather than trusting the
// library's own bookkeeping.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "betafree/adversary_sim.hpp"
#include "betafree/base_estimators.hpp"
#include "betafree/beta_grid.hpp"
#include "betafree/error_model.hpp"
#include "betafree/meta.hpp"
#include "betafree/rng.hpp"
#include "betafree/selectors.hpp"

using namespace betafree;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Verdict& v) {
  fmt::print("AC{} {} {}: {}\n", id, v.pass ? "PASS" : "FAIL", title, v.detail);
  std::fflush(stdout);
  failures += !v.pass;
}

// Local metric, independent of DistanceOracle.
double dist(const Point& a, const Point& b) {
  if (const auto* x = std::get_if<Scalar>(&a)) return std::abs(x->value - std::get<Scalar>(b).value);
  if (const auto* x = std::get_if<Vector>(&a)) {
    const auto& y = std::get<Vector>(b).values;
    long double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (long double)(x->values[i] - y[i]) * (x->values[i] - y[i]);
    return static_cast<double>(std::sqrt(s));
  }
  const auto& p = std::get<Pmf>(a).probabilities();
  const auto& q = std::get<Pmf>(b).probabilities();
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs((long double)p[i] - q[i]);
  return static_cast<double>(s / 2);
}

const ErrorModel& model(std::size_t i) {
  static const ErrorModel models[] = {ErrorModel::identity(), ErrorModel::sqrt_rate(),
                                      ErrorModel::beta_sqrt_log()};
  return models[i % 3];
}

// Instance family: grid length 1..50 built by direct recurrence, beta_max in
// [0.05, 0.49], theta small enough that the last beta stays above 1e-9.
struct Family {
  MetricKind metric;
  BetaGrid grid;
  const ErrorModel* f;
  InstanceShape shape;
};

Family draw(std::uint64_t seed, const std::vector<MetricKind>& metrics) {
  CounterRng rng(CounterRng::derive(0xACCE97, seed));
  Family fam{metrics[rng() % metrics.size()], {}, &model(rng() % 3), {}};
  const std::size_t len = 1 + rng() % 50;
  const double beta_max = rng.uniform(0.05, 0.49);
  const double theta_cap =
      len > 1 ? std::min(3.0, std::pow(beta_max / 1e-9, 1.0 / double(len - 1))) : 3.0;
  fam.grid.theta = rng.uniform(1.02, theta_cap);
  double b = beta_max;
  for (std::size_t i = 0; i < len; ++i, b /= fam.grid.theta) fam.grid.betas.push_back(b);
  fam.grid.inverse_target = fam.grid.betas.back();
  fam.grid.epsilon_target = (*fam.f)(fam.grid.betas.back());
  fam.shape.dimension = 1 + rng() % 5;
  fam.shape.support = 2 + rng() % 5;
  return fam;
}

bool audit_consistent(const ConsistentInstance& inst, const ErrorModel& f) {
  for (const auto& e : inst.series.entries()) {
    if (e.beta >= inst.alpha && dist(e.estimate, inst.truth) > f(e.beta)) return false;
  }
  const auto betas = inst.series.betas();
  return std::find(betas.begin(), betas.end(), inst.alpha) != betas.end();
}

// ---------------------------------------------------------------------------

Verdict factor_two() {
  const auto t0 = Clock::now();
  const std::vector<MetricKind> metrics = {MetricKind::AbsoluteDifference, MetricKind::Euclidean};
  std::size_t violations = 0, inconsistent = 0, undecided = 0;
  double worst = 0.0;
  std::uint64_t first_bad = 0;
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const auto fam = draw(seed, metrics);
    const auto& f = *fam.f;
    const auto inst =
        generate_consistent_instance(DistanceOracle(fam.metric), fam.grid, f, seed, fam.shape);
    if (!audit_consistent(inst, f)) {
      ++inconsistent;
      continue;
    }
    const double tol = 1e-9 * f(fam.grid.betas.front());
    const auto r = select_intersection(inst.series, f, tol);
    undecided += r.undecided_suffixes;
    const double err = dist(r.estimate, inst.truth);
    const double fa = f(inst.alpha);
    worst = std::max(worst, fa > 0 ? err / fa : 0.0);
    if (err > 2 * fa + 2 * tol) {
      if (violations++ == 0) first_bad = seed;
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = violations == 0 && inconsistent == 0 && secs < 60.0;
  v.detail = fmt::format(
      "10000 instances, {} violations, {} inconsistent, {} undecided suffixes, worst err/f(alpha) "
      "{:.6f}, {:.2f} s (limit 60 s){}",
      violations, inconsistent, undecided, worst, secs,
      violations ? fmt::format(", first failing seed {}", first_bad) : "");
  return v;
}

Verdict factor_three() {
  const auto t0 = Clock::now();
  const std::vector<MetricKind> metrics = {MetricKind::AbsoluteDifference, MetricKind::Euclidean,
                                           MetricKind::TotalVariation};
  std::size_t violations = 0, inconsistent = 0;
  std::size_t per_metric[3] = {0, 0, 0};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const auto fam = draw(seed + 1'000'000, metrics);
    const auto& f = *fam.f;
    const auto inst =
        generate_consistent_instance(DistanceOracle(fam.metric), fam.grid, f, seed, fam.shape);
    if (!audit_consistent(inst, f)) {
      ++inconsistent;
      continue;
    }
    ++per_metric[static_cast<int>(fam.metric)];
    const auto r = select_pairwise(inst.series, f);
    const double err = dist(r.estimate, inst.truth);
    const double fa = f(inst.alpha);
    worst = std::max(worst, fa > 0 ? err / fa : 0.0);
    violations += err > 3 * fa;
  }
  Verdict v;
  v.pass = violations == 0 && inconsistent == 0;
  v.detail = fmt::format(
      "10000 instances (abs {}, euclidean {}, tv {}), {} violations of err <= 3 f(alpha), {} "
      "inconsistent, worst ratio {:.6f}, {:.2f} s",
      per_metric[0], per_metric[1], per_metric[2], violations, inconsistent, worst,
      seconds_since(t0));
  return v;
}

Verdict lower_bound() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto id = ErrorModel::identity();
  for (double eps : {0.5, 0.25, 0.1}) {
    // Truth 1 with alpha = eps, or truth -1 with alpha = 1; both consistent
    // with x_eps = 1 + eps, x_1 = 0.
    const double target = 2.0 / (1.0 + eps);
    double best = std::numeric_limits<double>::infinity();
    constexpr long kSteps = 2'000'000;
    for (long k = 0; k <= kSteps; ++k) {
      const double x = -2.0 + 5.0 * double(k) / kSteps;
      best = std::min(best, std::max(std::abs(x - 1.0) / eps, std::abs(x + 1.0) / 1.0));
    }
    const bool scan_ok = best >= target * (1 - 1e-12) && best <= target + 1e-5;

    const EstimateSeries s(DistanceOracle(MetricKind::AbsoluteDifference),
                           {{eps, Scalar{1.0 + eps}}, {1.0, Scalar{0.0}}});
    const auto r = select_intersection(s, id, 0.0);
    const double x = std::get<Scalar>(r.estimate).value;
    const double ratio = std::max(std::abs(x - 1.0) / eps, std::abs(x + 1.0));
    const bool ours_ok = ratio <= 2.0;
    v.pass = v.pass && scan_ok && ours_ok;
    v.detail += fmt::format("eps={}: min max-ratio {:.6f} (>= 2/(1+eps) = {:.6f}), ours {:.6f}; ",
                            eps, best, target, ratio);
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 1.0;
  v.detail += fmt::format("{:.3f} s (limit 1 s)", secs);
  return v;
}

class CountingBase final : public BaseEstimator {
 public:
  std::string name() const override { return "counting-trimmed-mean"; }
  Point estimate(const Dataset& data, double beta) const override {
    ++calls;
    return Scalar{trimmed_mean(data, beta)};
  }
  mutable std::atomic<std::size_t> calls{0};
};

Verdict end_to_end() {
  const auto t0 = Clock::now();
  const std::size_t n = 10'000;
  const double sigma = 1.0;
  const ErrorModel f = ErrorModel::trimmed_mean(sigma, n);
  // Excess inverse of sigma (3 sqrt(beta) + 3 / sqrt(n)) at 0.01.
  const double inverse = std::pow(0.01 / (3.0 * sigma), 2);
  std::vector<double> local_grid{0.4};
  while (local_grid.back() > inverse) local_grid.push_back(local_grid.back() / 1.1);
  const auto grid = build_beta_grid(0.4, 1.1, 0.01, f);

  Verdict v;
  v.pass = grid.betas == local_grid;
  v.detail = fmt::format("grid length {} (local recurrence {}); ", grid.size(), local_grid.size());
  for (double alpha : {0.01, 0.05, 0.1, 0.2}) {
    double cover = 0.0;
    for (double b : local_grid) {
      if (b >= alpha) cover = b;
    }
    const bool cover_ok = cover <= std::max(1.1 * alpha, inverse);
    std::atomic<std::size_t> ok{0};
    std::atomic<std::size_t> bad_calls{0};
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t t = next++; t < 200; t = next++) {
        const Scenario sc{"ac4", GaussianMean{0.0, sigma}, alpha, AdaptiveWorst{}, n, 7'000 + t};
        const Dataset data = sample_contaminated(sc);
        CountingBase base;
        const auto run = run_meta(base, grid, f, SelectorKind::Pairwise, data);
        bad_calls += base.calls.load() != local_grid.size();
        ok += std::abs(std::get<Scalar>(run.selection.estimate).value) <= 3.0 * f(cover);
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 1; w < std::max(2U, std::thread::hardware_concurrency()); ++w) {
        pool.emplace_back(work);
      }
      work();
    }
    v.pass = v.pass && cover_ok && ok >= 190 && bad_calls == 0;
    v.detail += fmt::format("alpha={}: cover {:.5g}, {}/200 within 3f(alpha'), {} bad call counts; ",
                            alpha, cover, ok.load(), bad_calls.load());
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 120.0;
  v.detail += fmt::format("{:.2f} s (limit 120 s)", secs);
  return v;
}

Verdict plugin_dominance() {
  const std::size_t nodes = 1'000;
  const auto family = ParametricErrorFamily::erdos_renyi(nodes);
  std::vector<double> betas{0.4};
  while (betas.back() > 1e-4) betas.push_back(betas.back() / 1.1);
  const double logn = std::log(double(nodes));
  auto v_of = [](double p) { return p * (1 - p); };
  // Inverse of v on [0, 1/2].
  auto p_of = [](double v) { return 0.5 * (1 - std::sqrt(std::max(0.0, 1 - 4 * v))); };

  CounterRng rng(0xD0);
  std::size_t dominated = 0, excess_ok = 0, tested = 0;
  std::size_t control_failed = 0, controls = 0;
  while (tested < 1'000 || controls < 1'000) {
    const double p = rng.uniform(0.001, 0.5);
    const double slack = rng.uniform(1e-4, 0.05);
    if (tested < 1'000) {
      const double p_tilde = p_of(std::min(0.25, v_of(p) + rng.uniform(0.0, 1.0) * slack));
      const double dv = v_of(p_tilde) - v_of(p);
      if (dv < 0.0 || dv > slack) continue;  // rounding pushed it off the contract
      ++tested;
      const ErrorModel g = plugin_error_model(p_tilde, slack, family);
      const ErrorModel f = family.at(p);
      bool dom = true;
      bool excess = true;
      for (double b : betas) {
        dom = dom && g(b) >= f(b);
        const double cap = b * std::sqrt(slack * std::log(1 / b) / nodes) +
                           std::sqrt(slack * logn) / nodes;
        excess = excess && g(b) - f(b) <= cap * (1 + 1e-12) + 1e-15;
      }
      dominated += dom;
      excess_ok += excess;
    } else {
      // Negative control: v(p_tilde) < v(p).
      const double p_tilde = p_of(v_of(p) * rng.uniform(0.05, 0.95));
      ++controls;
      const ErrorModel g = plugin_error_model(p_tilde, slack, family);
      control_failed += !dominates(g, family.at(p), betas);
    }
  }
  Verdict v;
  v.pass = dominated == 1'000 && excess_ok == 1'000 && control_failed == 1'000;
  v.detail = fmt::format(
      "{}/1000 contract pairs dominate on {} betas, {}/1000 within the stated excess, negative "
      "control: {}/1000 fail dominance",
      dominated, betas.size(), excess_ok, control_failed);
  return v;
}

Verdict negative_results() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto inst = TwoParamInstance::textbook();
  bool consistent = std::all_of(inst.candidates.begin(), inst.candidates.end(),
                                [&](const auto& c) { return candidate_consistent(inst, c); });
  std::string infeasible;
  for (double c : {1.0, 2.0, 10.0, 100.0, 1000.0}) {
    const bool feasible = verify_two_param_counterexample(inst, c).feasible;
    v.pass = v.pass && !feasible;
    infeasible += fmt::format("{}{}", infeasible.empty() ? "" : ",", feasible ? "F" : "I");
  }
  v.pass = v.pass && consistent;

  const double eps = 0.01;
  const auto a = verify_mean_variance_impossibility(eps, 5.0, 1'000, 2'000);
  const auto b = verify_mean_variance_impossibility(eps, 5.0, 1'000, 2'000);
  std::vector<double> s1 = a.world1_sample, s2 = a.world2_sample;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  const double mean2 = std::accumulate(s2.begin(), s2.end(), 0.0) / double(s2.size());
  // Any x_hat within eps of world 1's mean 0 is at least 2.1 eps - eps away
  // from world 2's mean.
  const double gap = std::abs(mean2 - eps);
  const bool arithmetic = std::abs(mean2 - 2.1 * eps) < 1e-15 && std::abs(gap - 1.1 * eps) < 1e-15 &&
                          std::abs(a.world2_error_floor - 1.1 * eps) < 1e-15 &&
                          a.world1_target == eps && a.world2_target == eps;
  const bool shared = s1 == s2 && a.samples_identical;
  const bool deterministic = a.world1_sample == b.world1_sample &&
                             a.candidates_tested == b.candidates_tested &&
                             a.best_overshoot == b.best_overshoot;
  v.pass = v.pass && arithmetic && shared && deterministic && a.impossibility_holds();
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 1.0;
  v.detail = fmt::format(
      "two-param c_max 1,2,10,100,1000 -> {} (I = infeasible); world-2 mean {:.17g}, gap {:.17g} "
      "(1.1 eps = {:.17g}); shared sample {}; {}/{} outputs serve both worlds; {:.3f} s (limit 1 s)",
      infeasible, mean2, gap, 1.1 * eps, shared ? "identical" : "DIFFERENT",
      a.candidates_satisfying_both, a.candidates_tested, secs);
  return v;
}

Verdict oracle_equivalence() {
  std::size_t disagree_int = 0, disagree_pw = 0;
  for (std::uint64_t seed = 0; seed < 1'000; ++seed) {
    CounterRng rng(CounterRng::derive(0xE0, seed));
    const ErrorModel& f = model(rng() % 3);
    const std::size_t m = 1 + rng() % 30;
    std::vector<double> betas;
    while (betas.size() < m) {
      const double b = rng.uniform(1e-4, 0.5);
      if (std::find(betas.begin(), betas.end(), b) == betas.end()) betas.push_back(b);
    }
    std::sort(betas.begin(), betas.end());
    const double spread = std::vector<double>{0.3, 1.0, 3.0}[rng() % 3];
    std::vector<double> xs;
    std::vector<EstimateSeries::Entry> entries;
    for (double b : betas) {
      double x = spread * f(b) * rng.uniform(-1.0, 1.0);
      if (rng.uniform() < 0.15) x += rng.uniform(-5.0, 5.0);
      xs.push_back(x);
      entries.push_back({b, Scalar{x}});
    }
    const EstimateSeries series(DistanceOracle(MetricKind::AbsoluteDifference), entries);
    const double tol = seed % 2 ? 0.0 : 1e-9 * f(betas.back());

    // Brute-force suffix-interval scan, smallest start first.
    std::size_t start = m - 1;
    double lo = 0, hi = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double l = -INFINITY, h = INFINITY;
      for (std::size_t i = j; i < m; ++i) {
        l = std::max(l, xs[i] - f(betas[i]) - tol);
        h = std::min(h, xs[i] + f(betas[i]) + tol);
      }
      if (l <= h) {
        start = j;
        lo = l;
        hi = h;
        break;
      }
    }
    const auto in = select_intersection(series, f, tol);
    const double xin = std::get<Scalar>(in.estimate).value;
    disagree_int += in.chosen_beta != betas[start] || xin < lo || xin > hi;

    // Brute-force pairwise condition over every candidate.
    std::size_t pick = m - 1;
    for (std::size_t j = 0; j < m; ++j) {
      bool ok = true;
      for (std::size_t i = j; i < m; ++i) {
        ok = ok && std::abs(xs[i] - xs[j]) <= f(betas[i]) + f(betas[j]) + kPairwiseSlack;
      }
      if (ok) {
        pick = j;
        break;
      }
    }
    const auto pw = select_pairwise(series, f);
    disagree_pw += pw.chosen_beta != betas[pick] || std::get<Scalar>(pw.estimate).value != xs[pick];
  }
  Verdict v;
  v.pass = disagree_int == 0 && disagree_pw == 0;
  v.detail = fmt::format("1000 random 1D series: {} intersection disagreements, {} pairwise "
                         "disagreements",
                         disagree_int, disagree_pw);
  return v;
}

}  // namespace

int main() {
  report(1, "factor-2 intersection suite", factor_two());
  report(2, "factor-3 pairwise suite", factor_three());
  report(3, "two-point lower bound", lower_bound());
  report(4, "end-to-end trimmed mean", end_to_end());
  report(5, "plug-in dominance", plugin_dominance());
  report(6, "negative results", negative_results());
  report(7, "oracle equivalence", oracle_equivalence());
  fmt::print("{} of 7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
