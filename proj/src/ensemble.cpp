#include <cmath>
#include <numeric>

#include "rankstab/error.hpp"
#include "rankstab/models.hpp"

namespace rankstab {

ForestModel fit_forest(const Dataset& d, const ForestConfig& config, std::uint64_t seed) {
  if (config.n_trees < 1) {
    raise(ErrorCode::ConfigInvalid, "forest needs at least 1 tree");
  }
  const std::size_t m = d.rows();
  const auto p = static_cast<int>(d.cols());
  const int subset = config.feature_subset > 0
                         ? config.feature_subset
                         : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));

  std::vector<double> targets(d.labels.begin(), d.labels.end());
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(config.n_trees));
  std::vector<std::size_t> rows(m);
  for (int b = 0; b < config.n_trees; ++b) {
    for (auto& row : rows) row = pick(engine);
    trees.push_back(detail::build_tree(d.features, targets, rows, /*regression=*/false,
                                       config.tree.max_depth, config.tree.min_samples_split,
                                       subset, &engine));
  }
  return ForestModel(std::move(trees), d.cols());
}

BoostedModel fit_boosted(const Dataset& d, const BoostedConfig& config) {
  if (config.rounds < 0) {
    raise(ErrorCode::ConfigInvalid, "boosting rounds must be >= 0");
  }
  const std::size_t m = d.rows();
  double positives = 0.0;
  for (int y : d.labels) positives += y;
  const double base_rate = positives / static_cast<double>(m);
  const double initial_logit = std::log(base_rate / (1.0 - base_rate));

  std::vector<double> logits(m, initial_logit);
  std::vector<double> residuals(m);
  std::vector<std::size_t> rows(m);
  std::iota(rows.begin(), rows.end(), 0);

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < m; ++i) {
      residuals[i] = static_cast<double>(d.labels[i]) - sigmoid(logits[i]);
    }
    Tree tree = detail::build_tree(d.features, residuals, rows, /*regression=*/true,
                                   config.max_depth, config.min_samples_split,
                                   /*feature_subset=*/0, nullptr);
    for (std::size_t i = 0; i < m; ++i) {
      logits[i] += config.learning_rate * tree.predict_value(d.row(i));
      if (!std::isfinite(logits[i])) {
        raise(ErrorCode::NonFinite, "boosted logits diverged");
      }
    }
    trees.push_back(std::move(tree));
  }
  return BoostedModel(initial_logit, config.learning_rate, std::move(trees), d.cols());
}

}  // namespace rankstab
