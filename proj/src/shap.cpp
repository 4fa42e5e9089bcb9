#include "rankstab/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "rankstab/error.hpp"

namespace rankstab {

namespace {

void check_inputs(const Model& model, std::span<const double> x, const RowMatrix& background) {
  if (background.rows() == 0) {
    raise(ErrorCode::EmptyBackground, "SHAP needs a non-empty background dataset");
  }
  if (x.size() != model.feature_count() ||
      static_cast<std::size_t>(background.cols()) != model.feature_count()) {
    raise(ErrorCode::WidthMismatch, "instance/background width does not match model");
  }
}

/// Mean model output over background rows with the masked-in features of `x`
/// overwriting each background row.
class ValueFunction {
 public:
  ValueFunction(const Model& model, std::span<const double> x, const RowMatrix& background)
      : model_(model), x_(x), background_(background), buffer_(x.size()) {}

  double operator()(std::uint32_t mask) const {
    double total = 0.0;
    const std::size_t p = x_.size();
    const auto rows = static_cast<std::size_t>(background_.rows());
    for (std::size_t b = 0; b < rows; ++b) {
      const double* row = background_.data() + b * p;
      for (std::size_t j = 0; j < p; ++j) {
        buffer_[j] = (mask >> j) & 1u ? x_[j] : row[j];
      }
      total += model_.explanation_output(buffer_);
    }
    return total / static_cast<double>(rows);
  }

 private:
  const Model& model_;
  std::span<const double> x_;
  const RowMatrix& background_;
  mutable std::vector<double> buffer_;
};

}  // namespace

double ShapleyExplanation::total() const {
  double sum = base_value;
  for (double v : phi) sum += v;
  return sum;
}

ShapleyExplanation shap_exact(const Model& model, std::span<const double> x,
                              const RowMatrix& background, std::size_t max_features) {
  check_inputs(model, x, background);
  const std::size_t p = model.feature_count();
  if (p > max_features || p > 31) {
    raise(ErrorCode::TooManyFeatures,
          "exact SHAP caps enumeration at " + std::to_string(max_features) +
              " features, got " + std::to_string(p));
  }

  const ValueFunction value(model, x, background);
  const std::size_t n_masks = std::size_t{1} << p;
  std::vector<double> v(n_masks);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    v[mask] = value(static_cast<std::uint32_t>(mask));
  }

  // Subset weights |S|! (P - |S| - 1)! / P! indexed by |S|.
  std::vector<double> weight(p);
  for (std::size_t s = 0; s < p; ++s) {
    double w = 1.0 / static_cast<double>(p);
    for (std::size_t k = 1; k <= s; ++k) {
      w *= static_cast<double>(k) / static_cast<double>(p - k);
    }
    weight[s] = w;
  }

  ShapleyExplanation explanation;
  explanation.base_value = v[0];
  explanation.phi.assign(p, 0.0);
  explanation.mode = ShapMode::Exact;
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t i = 0; i < p; ++i) {
      if (mask & (std::size_t{1} << i)) continue;
      explanation.phi[i] += weight[size] * (v[mask | (std::size_t{1} << i)] - v[mask]);
    }
  }
  return explanation;
}

namespace {

void accumulate_permutation(const ValueFunction& value, std::span<const int> order,
                            std::vector<double>& phi, double v_empty) {
  std::uint32_t mask = 0;
  double previous = v_empty;
  for (int feature : order) {
    mask |= std::uint32_t{1} << feature;
    const double current = value(mask);
    phi[static_cast<std::size_t>(feature)] += current - previous;
    previous = current;
  }
}

}  // namespace

ShapleyExplanation shap_sampled(const Model& model, std::span<const double> x,
                                const RowMatrix& background, std::size_t n_permutations,
                                std::uint64_t seed, bool enumerate_all) {
  check_inputs(model, x, background);
  const std::size_t p = model.feature_count();
  if (p > 31) {
    raise(ErrorCode::TooManyFeatures, "permutation SHAP supports at most 31 features");
  }
  if (!enumerate_all && n_permutations < 1) {
    raise(ErrorCode::ConfigInvalid, "n_permutations must be >= 1");
  }
  if (enumerate_all && p > 8) {
    raise(ErrorCode::TooManyFeatures, "full permutation enumeration is capped at 8 features");
  }

  const ValueFunction value(model, x, background);
  const double v_empty = value(0);

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(p, 0.0);
  std::size_t count = 0;

  if (enumerate_all) {
    do {
      accumulate_permutation(value, order, phi, v_empty);
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    std::mt19937_64 engine(seed);
    for (std::size_t k = 0; k < n_permutations; ++k) {
      std::shuffle(order.begin(), order.end(), engine);
      accumulate_permutation(value, order, phi, v_empty);
      ++count;
    }
  }
  for (double& v : phi) v /= static_cast<double>(count);

  ShapleyExplanation explanation;
  explanation.base_value = v_empty;
  explanation.phi = std::move(phi);
  explanation.mode = enumerate_all ? ShapMode::EnumeratedPermutations : ShapMode::Sampled;
  explanation.n_permutations = count;
  return explanation;
}

ShapleyExplanation shap_auto(const Model& model, std::span<const double> x,
                             const RowMatrix& background, const ShapOptions& options) {
  if (model.feature_count() <= options.exact_max_features) {
    return shap_exact(model, x, background, options.exact_max_features);
  }
  return shap_sampled(model, x, background, options.n_permutations, options.seed);
}

ImportanceVector shap_global(const Model& model, const RowMatrix& instances,
                             const RowMatrix& background, const ShapOptions& options) {
  if (instances.rows() < 1) {
    raise(ErrorCode::ConfigInvalid, "shap_global needs at least one instance");
  }
  const auto p = static_cast<std::size_t>(instances.cols());
  std::vector<double> scores(p, 0.0);
  for (Eigen::Index i = 0; i < instances.rows(); ++i) {
    const std::span<const double> row{instances.data() + static_cast<std::size_t>(i) * p, p};
    ShapOptions per_instance = options;
    per_instance.seed = options.seed + static_cast<std::uint64_t>(i);
    const ShapleyExplanation explanation = shap_auto(model, row, background, per_instance);
    for (std::size_t j = 0; j < p; ++j) scores[j] += std::abs(explanation.phi[j]);
  }
  for (double& s : scores) s /= static_cast<double>(instances.rows());
  return ImportanceVector{std::move(scores), Scope::Global, -1};
}


ShapleyExplanation shap_exact(const Model& model, std::span<const double> x,
                              const Dataset& background, std::size_t max_features) {
  return shap_exact(model, x, background.features, max_features);
}

ShapleyExplanation shap_sampled(const Model& model, std::span<const double> x,
                                const Dataset& background, std::size_t n_permutations,
                                std::uint64_t seed, bool enumerate_all) {
  return shap_sampled(model, x, background.features, n_permutations, seed, enumerate_all);
}

ShapleyExplanation shap_auto(const Model& model, std::span<const double> x,
                             const Dataset& background, const ShapOptions& options) {
  return shap_auto(model, x, background.features, options);
}

ImportanceVector shap_global(const Model& model, const RowMatrix& instances,
                             const Dataset& background, const ShapOptions& options) {
  return shap_global(model, instances, background.features, options);
}

}  // namespace rankstab

