#include "betafree/beta_grid.hpp"

#include <cmath>

#include <fmt/format.h>

#include "betafree/errors.hpp"

namespace betafree {

namespace {
constexpr std::size_t kMaxGridLength = 1'000'000;
}

BetaGrid build_beta_grid(double beta_max, double theta, double epsilon, const ErrorModel& f) {
  if (!(beta_max > 0.0 && beta_max <= 0.5)) {
    throw ParameterError(fmt::format("beta_max must lie in (0, 1/2], got {}", beta_max));
  }
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    throw ParameterError(fmt::format("theta must be > 1, got {}", theta));
  }
  if (!(epsilon > 0.0)) {
    throw ParameterError(fmt::format("epsilon must be > 0, got {}", epsilon));
  }
  const double inverse = f.inverse_at(epsilon, beta_max);
  if (!(inverse > 0.0)) {
    throw ParameterError(
        fmt::format("f^-1({}) = {} is not positive; the grid would never terminate", epsilon,
                    inverse));
  }
  BetaGrid grid{{beta_max}, theta, epsilon, inverse};
  while (grid.betas.back() > inverse) {
    if (grid.betas.size() >= kMaxGridLength) {
      throw ParameterError("beta grid exceeds the maximum supported length");
    }
    grid.betas.push_back(grid.betas.back() / theta);
  }
  return grid;
}

std::size_t grid_length_bound(double beta_max, double theta, double inverse) {
  if (inverse >= beta_max) {
    return 1;
  }
  return static_cast<std::size_t>(std::ceil(std::log(beta_max / inverse) / std::log(theta))) + 1;
}

std::optional<double> grid_cover(const BetaGrid& grid, double alpha) {
  std::optional<double> cover;
  for (double b : grid.betas) {
    if (b >= alpha) {
      cover = b;
    }
  }
  return cover;
}

}  // namespace betafree
