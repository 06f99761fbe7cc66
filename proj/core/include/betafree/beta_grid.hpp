#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "betafree/error_model.hpp"

namespace betafree {

/// beta_max / theta^i for i = 0, 1, ... until the first element at or below
/// f^{-1}(epsilon). Stored in decreasing order.
struct BetaGrid {
  std::vector<double> betas;
  double theta = 2.0;
  double epsilon_target = 0.0;
  /// f^{-1}(epsilon_target) used for truncation.
  double inverse_target = 0.0;

  std::size_t size() const noexcept { return betas.size(); }
  double beta_max() const { return betas.front(); }
  std::vector<double> ascending() const { return {betas.rbegin(), betas.rend()}; }
};

/// Throws ParameterError unless 0 < beta_max <= 1/2, theta > 1, epsilon > 0
/// and f^{-1}(epsilon) > 0.
BetaGrid build_beta_grid(double beta_max, double theta, double epsilon, const ErrorModel& f);

/// ceil(log_theta(beta_max / inverse)) + 1, or 1 when inverse >= beta_max.
std::size_t grid_length_bound(double beta_max, double theta, double inverse);

/// The closest upper bound min { beta in grid : beta >= alpha }, or nullopt
/// when alpha exceeds beta_max.
std::optional<double> grid_cover(const BetaGrid& grid, double alpha);

}  // namespace betafree
