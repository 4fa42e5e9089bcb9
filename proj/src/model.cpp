#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "rankstab/error.hpp"
#include "rankstab/models.hpp"

namespace rankstab {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void Model::check_width(std::size_t width) const {
  if (width != feature_count()) {
    raise(ErrorCode::WidthMismatch, "instance width " + std::to_string(width) +
                                        " does not match model feature count " +
                                        std::to_string(feature_count()));
  }
}

std::vector<double> Model::predict_proba(const RowMatrix& instances) const {
  check_width(static_cast<std::size_t>(instances.cols()));
  std::vector<double> probabilities(static_cast<std::size_t>(instances.rows()));
  const auto cols = static_cast<std::size_t>(instances.cols());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    probabilities[i] = predict_proba_one({instances.data() + i * cols, cols});
  }
  return probabilities;
}

std::vector<int> Model::predict_labels(const RowMatrix& instances) const {
  const std::vector<double> probabilities = predict_proba(instances);
  std::vector<int> labels(probabilities.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = probabilities[i] >= 0.5 ? 1 : 0;
  }
  return labels;
}

double Tree::predict_value(std::span<const double> x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

double DecisionTree::predict_proba_one(std::span<const double> x) const {
  check_width(x.size());
  return tree_.predict_value(x);
}

int DecisionTree::depth() const {
  // Iterative depth over the flat node array.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int depth = 0;
  while (!stack.empty()) {
    const auto [node, level] = stack.back();
    stack.pop_back();
    depth = std::max(depth, level);
    const TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    if (n.feature >= 0) {
      stack.push_back({n.left, level + 1});
      stack.push_back({n.right, level + 1});
    }
  }
  return depth;
}

double DecisionTree::training_accuracy(const Dataset& d) const {
  const std::vector<int> predicted = predict_labels(d.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == d.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double ForestModel::predict_proba_one(std::span<const double> x) const {
  check_width(x.size());
  double total = 0.0;
  for (const Tree& tree : trees_) total += tree.predict_value(x);
  return total / static_cast<double>(trees_.size());
}

double BoostedModel::logit_one(std::span<const double> x) const {
  double logit = initial_logit_;
  for (const Tree& tree : trees_) logit += learning_rate_ * tree.predict_value(x);
  return logit;
}

double BoostedModel::predict_proba_one(std::span<const double> x) const {
  check_width(x.size());
  return sigmoid(logit_one(x));
}

double LogisticModel::logit_one(std::span<const double> x) const {
  check_width(x.size());
  const Eigen::VectorXd z = standardizer_.transform_row(x);
  return intercept_ + coefficients_.dot(z);
}

double LogisticModel::predict_proba_one(std::span<const double> x) const {
  return sigmoid(logit_one(x));
}

std::size_t ShapeFunction::bin_index(double x) const {
  // Bin b covers [edges[b-1], edges[b]); values outside the fitted range fall
  // into the first or last bin.
  return static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

double ShapeFunction::evaluate(double x) const {
  if (values.empty()) return 0.0;
  return values[bin_index(x)];
}

double AdditiveModel::logit_one(std::span<const double> x) const {
  check_width(x.size());
  double logit = intercept_;
  for (std::size_t j = 0; j < shapes_.size(); ++j) logit += shapes_[j].evaluate(x[j]);
  return logit;
}

double AdditiveModel::predict_proba_one(std::span<const double> x) const {
  return sigmoid(logit_one(x));
}

namespace detail {

double logistic_loss(const std::vector<double>& logits, const std::vector<int>& labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = labels[i] == 1 ? logits[i] : -logits[i];
    // log(1 + exp(-z)) without overflow
    loss += z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  return loss / static_cast<double>(logits.size());
}

}  // namespace detail

}  // namespace rankstab
