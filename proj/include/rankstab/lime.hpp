#pragma once

#include <cstdint>
#include <span>

#include "rankstab/dataset.hpp"
#include "rankstab/explain.hpp"
#include "rankstab/models.hpp"

namespace rankstab {

struct LimeConfig {
  std::size_t n_samples = 1000;
  double kernel_width = 0.0;  // 0 means 0.75 * sqrt(P)
  double ridge = 1e-3;
};

/// Local surrogate over presence indicators z' in {0,1}^P: intercept and one
/// coefficient per feature. Importance magnitude is |coefficient|.
struct LimeExplanation {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double kernel_width = 0.0;
  std::size_t n_samples = 0;
  int instance_id = -1;

  ImportanceVector importance() const;
};

/// Draws presence vectors uniformly from {0,1}^P, maps each to a hybrid
/// instance (x where present, background column mean where absent), weights
/// samples by exp(-hamming^2 / width^2) with hamming counted from the
/// all-ones vector, and fits a weighted ridge regression of the model's
/// probabilities on the presence indicators.
LimeExplanation lime_local(const Model& model, std::span<const double> x,
                           const RowMatrix& background, const LimeConfig& config,
                           std::uint64_t seed);
LimeExplanation lime_local(const Model& model, std::span<const double> x,
                           const Dataset& background, const LimeConfig& config,
                           std::uint64_t seed);

}  // namespace rankstab
