#pragma once

#include <span>
#include <vector>

#include "rankstab/models.hpp"
#include "rankstab/rankmetrics.hpp"

namespace rankstab {

enum class Scope { Global, Local };

/// Non-negative importance magnitude per feature. Magnitudes are what rank
/// extraction consumes; signed attributions take their absolute value first.
struct ImportanceVector {
  std::vector<double> scores;
  Scope scope = Scope::Global;
  int instance_id = -1;  // only meaningful for local scope
};

/// Descending score order, ties broken by ascending feature index.
RankVector rank_features(std::span<const double> scores);
inline RankVector rank_features(const ImportanceVector& iv) { return rank_features(iv.scores); }

/// Regression coefficient magnitude: |beta_j| on standardized features.
ImportanceVector rcm_global(const LogisticModel& m);

/// Per-instance contribution magnitude to the logit: |beta_j * z_j| with z
/// the standardized instance.
ImportanceVector rcm_local(const LogisticModel& m, std::span<const double> x);

/// Mean decrease impurity. Each split contributes
/// (n_node / n_train) * (impurity - weighted child impurity) to its feature;
/// totals are averaged across trees and normalized to sum 1. A model with no
/// splits yields the all-zero vector.
ImportanceVector mdi_global(const DecisionTree& m);
ImportanceVector mdi_global(const ForestModel& m);
ImportanceVector mdi_global(const BoostedModel& m);

/// Additive self-explanation: local |f_i(x_i)|, global mean over training
/// rows of |f_i(x_i)| (precomputed at fit time).
ImportanceVector additive_local(const AdditiveModel& m, std::span<const double> x);
ImportanceVector additive_global(const AdditiveModel& m);

}  // namespace rankstab
