#include "rankstab/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/error.hpp"

namespace rankstab {

namespace {

void accumulate_tree_mdi(const Tree& tree, std::vector<double>& totals) {
  if (tree.nodes.empty()) return;
  const double n_train = static_cast<double>(tree.nodes[0].n_rows);
  for (const TreeNode& node : tree.nodes) {
    if (node.feature < 0) continue;
    const TreeNode& left = tree.nodes[static_cast<std::size_t>(node.left)];
    const TreeNode& right = tree.nodes[static_cast<std::size_t>(node.right)];
    const double n = static_cast<double>(node.n_rows);
    const double weighted_children =
        (static_cast<double>(left.n_rows) * left.impurity +
         static_cast<double>(right.n_rows) * right.impurity) /
        n;
    totals[static_cast<std::size_t>(node.feature)] +=
        n / n_train * (node.impurity - weighted_children);
  }
}

ImportanceVector mdi_from_trees(std::span<const Tree> trees, std::size_t n_features) {
  std::vector<double> totals(n_features, 0.0);
  std::vector<double> per_tree(n_features, 0.0);
  for (const Tree& tree : trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    accumulate_tree_mdi(tree, per_tree);
    for (std::size_t j = 0; j < n_features; ++j) totals[j] += per_tree[j];
  }
  for (double& v : totals) v /= static_cast<double>(trees.size());
  const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : totals) v /= sum;
  }
  return ImportanceVector{std::move(totals), Scope::Global, -1};
}

}  // namespace

RankVector rank_features(std::span<const double> scores) {
  RankVector order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return order;
}

ImportanceVector rcm_global(const LogisticModel& m) {
  std::vector<double> scores(m.feature_count());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    scores[j] = std::abs(m.coefficients()[static_cast<Eigen::Index>(j)]);
  }
  return ImportanceVector{std::move(scores), Scope::Global, -1};
}

ImportanceVector rcm_local(const LogisticModel& m, std::span<const double> x) {
  const Eigen::VectorXd z = m.standardizer().transform_row(x);
  if (static_cast<std::size_t>(z.size()) != m.feature_count()) {
    raise(ErrorCode::WidthMismatch, "instance width does not match model");
  }
  std::vector<double> scores(m.feature_count());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    scores[j] = std::abs(m.coefficients()[i] * z[i]);
  }
  return ImportanceVector{std::move(scores), Scope::Local, -1};
}

ImportanceVector mdi_global(const DecisionTree& m) {
  return mdi_from_trees({&m.tree(), 1}, m.feature_count());
}

ImportanceVector mdi_global(const ForestModel& m) {
  return mdi_from_trees(m.trees(), m.feature_count());
}

ImportanceVector mdi_global(const BoostedModel& m) {
  if (m.trees().empty()) {
    return ImportanceVector{std::vector<double>(m.feature_count(), 0.0), Scope::Global, -1};
  }
  return mdi_from_trees(m.trees(), m.feature_count());
}

ImportanceVector additive_local(const AdditiveModel& m, std::span<const double> x) {
  if (x.size() != m.feature_count()) {
    raise(ErrorCode::WidthMismatch, "instance width does not match model");
  }
  std::vector<double> scores(m.feature_count());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    scores[j] = std::abs(m.shapes()[j].evaluate(x[j]));
  }
  return ImportanceVector{std::move(scores), Scope::Local, -1};
}

ImportanceVector additive_global(const AdditiveModel& m) {
  return ImportanceVector{m.global_importance(), Scope::Global, -1};
}

}  // namespace rankstab
