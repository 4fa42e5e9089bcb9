#pragma once

#include <cstdint>
#include <span>

#include "rankstab/dataset.hpp"
#include "rankstab/explain.hpp"
#include "rankstab/models.hpp"

namespace rankstab {

enum class ShapMode { Exact, Sampled, EnumeratedPermutations };

/// Additive feature attribution. base_value + sum(phi) equals the model's
/// explanation output for the instance: exactly by construction in exact
/// mode, and up to floating error in the permutation estimators (each
/// permutation telescopes to the same total).
struct ShapleyExplanation {
  double base_value = 0.0;       // mean model output over the background
  std::vector<double> phi;
  int instance_id = -1;
  ShapMode mode = ShapMode::Exact;
  std::size_t n_permutations = 0;  // permutation modes only

  double total() const;
};

struct ShapOptions {
  std::size_t exact_max_features = 15;  // exact enumeration cap (2^P subsets)
  std::size_t n_permutations = 500;     // sampled fallback above the cap
  std::uint64_t seed = 0;
};

/// Full subset enumeration. The value function replaces absent features with
/// background-row values and averages the model output over the background.
/// The RowMatrix overloads take bare background feature rows; the Dataset
/// overloads forward their feature matrix.
ShapleyExplanation shap_exact(const Model& model, std::span<const double> x,
                              const RowMatrix& background, std::size_t max_features = 15);
ShapleyExplanation shap_exact(const Model& model, std::span<const double> x,
                              const Dataset& background, std::size_t max_features = 15);

/// Monte Carlo estimate over uniformly random feature orderings; an unbiased
/// estimator of the exact attributions with the same value function.
/// `enumerate_all` replaces sampling with all P! orderings (small P only).
ShapleyExplanation shap_sampled(const Model& model, std::span<const double> x,
                                const RowMatrix& background, std::size_t n_permutations,
                                std::uint64_t seed, bool enumerate_all = false);
ShapleyExplanation shap_sampled(const Model& model, std::span<const double> x,
                                const Dataset& background, std::size_t n_permutations,
                                std::uint64_t seed, bool enumerate_all = false);

/// Exact when the feature count fits under the cap, sampled otherwise.
ShapleyExplanation shap_auto(const Model& model, std::span<const double> x,
                             const RowMatrix& background, const ShapOptions& options = {});
ShapleyExplanation shap_auto(const Model& model, std::span<const double> x,
                             const Dataset& background, const ShapOptions& options = {});

/// Mean |phi_i| over the given instances.
ImportanceVector shap_global(const Model& model, const RowMatrix& instances,
                             const RowMatrix& background, const ShapOptions& options = {});
ImportanceVector shap_global(const Model& model, const RowMatrix& instances,
                             const Dataset& background, const ShapOptions& options = {});

}  // namespace rankstab
