#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "rankstab/dataset.hpp"

namespace rankstab {

struct LogisticConfig {
  double l2 = 1e-3;
  int max_iterations = 100;
  double tolerance = 1e-8;
};

struct TreeConfig {
  int max_depth = 8;
  int min_samples_split = 5;
};

struct ForestConfig {
  int n_trees = 100;
  int feature_subset = 0;  // 0 means ceil(sqrt(P))
  TreeConfig tree{};
};

struct BoostedConfig {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_split = 5;
};

struct AdditiveConfig {
  int cycles = 50;
  int bins = 16;
  double learning_rate = 0.1;
};

/// Binary classifier interface. `explanation_output` is the quantity SHAP
/// and the linear-model oracle operate on: the logit for logistic models,
/// the probability for everything else.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t feature_count() const = 0;
  virtual double predict_proba_one(std::span<const double> x) const = 0;
  virtual double explanation_output(std::span<const double> x) const {
    return predict_proba_one(x);
  }

  std::vector<double> predict_proba(const RowMatrix& instances) const;
  std::vector<int> predict_labels(const RowMatrix& instances) const;  // 1[p >= 0.5]

 protected:
  void check_width(std::size_t width) const;
};

double sigmoid(double z);

// --------------------------------------------------------------------------
// Trees
// --------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // x[feature] < threshold goes left
  int left = -1;
  int right = -1;
  std::size_t n_rows = 0;
  double impurity = 0.0;  // Gini for classification, variance for gradient trees
  double value = 0.0;     // leaf payload: class-1 probability or regression step
};

/// Flat binary tree; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict_value(std::span<const double> x) const;
};

class DecisionTree : public Model {
 public:
  DecisionTree(Tree tree, std::size_t n_features) : tree_(std::move(tree)), n_features_(n_features) {}

  std::size_t feature_count() const override { return n_features_; }
  double predict_proba_one(std::span<const double> x) const override;

  const Tree& tree() const { return tree_; }
  int depth() const;
  double training_accuracy(const Dataset& d) const;

 private:
  Tree tree_;
  std::size_t n_features_;
};

class ForestModel : public Model {
 public:
  ForestModel(std::vector<Tree> trees, std::size_t n_features)
      : trees_(std::move(trees)), n_features_(n_features) {}

  std::size_t feature_count() const override { return n_features_; }
  double predict_proba_one(std::span<const double> x) const override;

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::size_t n_features_;
};

class BoostedModel : public Model {
 public:
  BoostedModel(double initial_logit, double learning_rate, std::vector<Tree> trees,
               std::size_t n_features)
      : initial_logit_(initial_logit),
        learning_rate_(learning_rate),
        trees_(std::move(trees)),
        n_features_(n_features) {}

  std::size_t feature_count() const override { return n_features_; }
  double predict_proba_one(std::span<const double> x) const override;
  double logit_one(std::span<const double> x) const;

  double initial_logit() const { return initial_logit_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  double initial_logit_;
  double learning_rate_;
  std::vector<Tree> trees_;
  std::size_t n_features_;
};

// --------------------------------------------------------------------------
// Logistic regression
// --------------------------------------------------------------------------

class LogisticModel : public Model {
 public:
  LogisticModel(double intercept, Eigen::VectorXd coefficients, Standardizer standardizer)
      : intercept_(intercept),
        coefficients_(std::move(coefficients)),
        standardizer_(std::move(standardizer)) {}

  std::size_t feature_count() const override {
    return static_cast<std::size_t>(coefficients_.size());
  }
  double predict_proba_one(std::span<const double> x) const override;
  double explanation_output(std::span<const double> x) const override { return logit_one(x); }

  double logit_one(std::span<const double> x) const;
  double intercept() const { return intercept_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const Standardizer& standardizer() const { return standardizer_; }

 private:
  double intercept_;
  Eigen::VectorXd coefficients_;
  Standardizer standardizer_;
};

// --------------------------------------------------------------------------
// Additive stump-boosted model
// --------------------------------------------------------------------------

/// Piecewise-constant shape function over bin edges. `values` has
/// `edges.size() + 1` entries; value for x is values[# edges <= x].
struct ShapeFunction {
  std::vector<double> edges;   // strictly increasing interior edges
  std::vector<double> values;  // per-bin contribution, centered after fitting

  double evaluate(double x) const;
  std::size_t bin_index(double x) const;
};

class AdditiveModel : public Model {
 public:
  AdditiveModel(double intercept, std::vector<ShapeFunction> shapes,
                std::vector<double> global_importance)
      : intercept_(intercept),
        shapes_(std::move(shapes)),
        global_importance_(std::move(global_importance)) {}

  std::size_t feature_count() const override { return shapes_.size(); }
  double predict_proba_one(std::span<const double> x) const override;
  double logit_one(std::span<const double> x) const;

  double intercept() const { return intercept_; }
  const std::vector<ShapeFunction>& shapes() const { return shapes_; }
  /// Mean |f_i(x_i)| over the training rows, computed at fit time.
  const std::vector<double>& global_importance() const { return global_importance_; }

 private:
  double intercept_;
  std::vector<ShapeFunction> shapes_;
  std::vector<double> global_importance_;
};

// --------------------------------------------------------------------------
// Fitting
// --------------------------------------------------------------------------

LogisticModel fit_logistic(const Dataset& d, const LogisticConfig& config = {});
DecisionTree fit_tree(const Dataset& d, const TreeConfig& config = {});
ForestModel fit_forest(const Dataset& d, const ForestConfig& config = {}, std::uint64_t seed = 0);
BoostedModel fit_boosted(const Dataset& d, const BoostedConfig& config = {});
AdditiveModel fit_additive(const Dataset& d, const AdditiveConfig& config = {});

namespace detail {

/// Greedy CART on the given rows. `targets` are class labels for Gini trees
/// (pass labels as doubles 0/1 and set `regression=false`) or gradient
/// residuals for regression trees. `feature_subset` of 0 considers every
/// feature at every split; otherwise a random subset of that size is drawn
/// per split from `engine`.
Tree build_tree(const RowMatrix& features, const std::vector<double>& targets,
                const std::vector<std::size_t>& row_indices, bool regression, int max_depth,
                int min_samples_split, int feature_subset, std::mt19937_64* engine);

double logistic_loss(const std::vector<double>& logits, const std::vector<int>& labels);

}  // namespace detail

}  // namespace rankstab
