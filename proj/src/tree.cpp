#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/error.hpp"
#include "rankstab/models.hpp"

namespace rankstab {
namespace detail {

namespace {

// Relative floor below which a split is treated as pure noise.
constexpr double kMinGainRatio = 1e-12;

struct NodeStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
};

NodeStats compute_stats(const std::vector<double>& targets,
                        const std::vector<std::size_t>& rows) {
  NodeStats stats;
  stats.n = rows.size();
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t row : rows) {
    sum += targets[row];
    sumsq += targets[row] * targets[row];
  }
  const double n = static_cast<double>(stats.n);
  stats.mean = sum / n;
  stats.variance = std::max(0.0, sumsq / n - stats.mean * stats.mean);
  return stats;
}

struct Builder {
  const RowMatrix& features;
  const std::vector<double>& targets;
  bool regression;
  int max_depth;
  int min_samples_split;
  int feature_subset;
  std::mt19937_64* engine;
  Tree tree;

  // Scratch reused across nodes.
  std::vector<std::pair<double, double>> sorted;  // (feature value, target)
  std::vector<int> all_features;

  double record_impurity(const NodeStats& stats) const {
    // Variance of 0/1 targets is p(1-p); Gini for two classes is 2p(1-p).
    return regression ? stats.variance : 2.0 * stats.variance;
  }

  int build(std::vector<std::size_t>& rows, int depth) {
    const NodeStats stats = compute_stats(targets, rows);
    const int node_index = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.n_rows = stats.n;
    node.impurity = record_impurity(stats);
    node.value = stats.mean;
    tree.nodes.push_back(node);

    if (depth >= max_depth || stats.n < static_cast<std::size_t>(min_samples_split) ||
        stats.variance <= 0.0) {
      return node_index;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 0.0;
    const double min_gain = kMinGainRatio * stats.variance;

    const auto p = static_cast<int>(features.cols());
    const bool subsample_features = feature_subset > 0 && feature_subset < p;
    std::vector<int> candidates;
    if (subsample_features) {
      std::sample(all_features.begin(), all_features.end(), std::back_inserter(candidates),
                  feature_subset, *engine);
    }
    const std::vector<int>& feature_list = subsample_features ? candidates : all_features;

    const double n = static_cast<double>(stats.n);
    double total_sum = 0.0;
    for (std::size_t row : rows) total_sum += targets[row];

    for (int feature : feature_list) {
      sorted.clear();
      for (std::size_t row : rows) {
        sorted.emplace_back(features(static_cast<Eigen::Index>(row), feature), targets[row]);
      }
      std::sort(sorted.begin(), sorted.end());

      double left_sum = 0.0;
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        left_sum += sorted[i - 1].second;
        if (sorted[i].first == sorted[i - 1].first) continue;
        const double n_left = static_cast<double>(i);
        const double n_right = n - n_left;
        const double right_sum = total_sum - left_sum;
        // Weighted variance reduction, dropping terms constant in the split.
        const double gain_proxy =
            left_sum * left_sum / n_left + right_sum * right_sum / n_right;
        const double gain = gain_proxy / n - stats.mean * stats.mean;
        if (gain > best_gain && gain > min_gain) {
          best_gain = gain;
          best_feature = feature;
          best_threshold = 0.5 * (sorted[i - 1].first + sorted[i].first);
        }
      }
    }

    if (best_feature < 0) return node_index;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t row : rows) {
      if (features(static_cast<Eigen::Index>(row), best_feature) < best_threshold) {
        left_rows.push_back(row);
      } else {
        right_rows.push_back(row);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left_index = build(left_rows, depth + 1);
    const int right_index = build(right_rows, depth + 1);
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(node_index)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_index;
    parent.right = right_index;
    return node_index;
  }
};

}  // namespace

Tree build_tree(const RowMatrix& features, const std::vector<double>& targets,
                const std::vector<std::size_t>& row_indices, bool regression, int max_depth,
                int min_samples_split, int feature_subset, std::mt19937_64* engine) {
  Builder builder{features, targets, regression, max_depth, min_samples_split,
                  feature_subset, engine, {}, {}, {}};
  builder.all_features.resize(static_cast<std::size_t>(features.cols()));
  std::iota(builder.all_features.begin(), builder.all_features.end(), 0);
  std::vector<std::size_t> rows = row_indices;
  builder.build(rows, 0);
  return std::move(builder.tree);
}

}  // namespace detail

DecisionTree fit_tree(const Dataset& d, const TreeConfig& config) {
  std::vector<double> targets(d.labels.begin(), d.labels.end());
  std::vector<std::size_t> rows(d.rows());
  std::iota(rows.begin(), rows.end(), 0);
  Tree tree = detail::build_tree(d.features, targets, rows, /*regression=*/false,
                                 config.max_depth, config.min_samples_split,
                                 /*feature_subset=*/0, nullptr);
  return DecisionTree(std::move(tree), d.cols());
}

}  // namespace rankstab
