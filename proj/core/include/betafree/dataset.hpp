#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace betafree {

/// One-dimensional sample set. Keeps a sorted copy alongside the draw order
/// so order-statistic estimators can be invoked once per beta cheaply and
/// concurrently.
class Dataset {
 public:
  /// Throws ParameterError if empty or any sample is not finite.
  explicit Dataset(std::vector<double> samples);

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return samples_.size(); }

 private:
  std::vector<double> samples_;
  std::vector<double> sorted_;
};

}  // namespace betafree
