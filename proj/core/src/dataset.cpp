#include "betafree/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "betafree/errors.hpp"

namespace betafree {

Dataset::Dataset(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw ParameterError("dataset needs at least one sample");
  }
  if (!std::all_of(samples_.begin(), samples_.end(), [](double x) { return std::isfinite(x); })) {
    throw ParameterError("dataset contains a non-finite sample");
  }
  sorted_ = samples_;
  std::sort(sorted_.begin(), sorted_.end());
}

}  // namespace betafree
