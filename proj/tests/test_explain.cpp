#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <numeric>

#include "doctest.h"
#include "rankstab/error.hpp"
#include "rankstab/explain.hpp"
#include "rankstab/lime.hpp"
#include "rankstab/models.hpp"
#include "rankstab/shap.hpp"
#include "synth.hpp"

using namespace rankstab;

namespace {

Standardizer identity_standardizer(std::size_t p) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  s.stddev = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p));
  return s;
}

LogisticModel make_logistic(double intercept, std::vector<double> beta) {
  Eigen::VectorXd coefficients(static_cast<Eigen::Index>(beta.size()));
  for (std::size_t j = 0; j < beta.size(); ++j) {
    coefficients[static_cast<Eigen::Index>(j)] = beta[j];
  }
  return LogisticModel(intercept, std::move(coefficients), identity_standardizer(beta.size()));
}

/// Depth-1 stump: x[feature] < threshold -> left value, else right value.
Tree make_stump(int feature, double threshold, double left_value, double right_value,
                std::size_t n_rows = 100, double impurity = 0.5) {
  Tree tree;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.n_rows = n_rows;
  root.impurity = impurity;
  TreeNode left;
  left.n_rows = n_rows / 2;
  left.value = left_value;
  TreeNode right;
  right.n_rows = n_rows - n_rows / 2;
  right.value = right_value;
  tree.nodes = {root, left, right};
  return tree;
}

RowMatrix gaussian_background(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  RowMatrix background(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < background.rows(); ++i) {
    for (Eigen::Index j = 0; j < background.cols(); ++j) background(i, j) = gaussian(engine);
  }
  return background;
}

struct ConstantModel : Model {
  double value;
  std::size_t p;
  ConstantModel(double value, std::size_t p) : value(value), p(p) {}
  std::size_t feature_count() const override { return p; }
  double predict_proba_one(std::span<const double>) const override { return value; }
};

}  // namespace

// ---------------------------------------------------------------------------
// RCM
// ---------------------------------------------------------------------------

TEST_CASE("rcm_global is the absolute coefficient vector") {
  const LogisticModel m = make_logistic(0.3, {2.0, -3.0, 0.5});
  const ImportanceVector iv = rcm_global(m);
  CHECK(iv.scores == std::vector<double>{2.0, 3.0, 0.5});
  CHECK(rank_features(iv) == RankVector{1, 0, 2});
}

TEST_CASE("rcm_global breaks ties toward the lower feature index") {
  const LogisticModel m = make_logistic(0.0, {1.0, 1.0});
  CHECK(rank_features(rcm_global(m)) == RankVector{0, 1});
}

TEST_CASE("rcm_global recovers the planted feature on fitted data") {
  const Dataset d = testsupport::make_planted_dataset(500, 5, 1, 42);
  const LogisticModel m = fit_logistic(d);
  CHECK(rank_features(rcm_global(m))[0] == 0);
}

TEST_CASE("rcm_local scores contributions to the logit") {
  const LogisticModel m = make_logistic(0.0, {2.0, 1.0});
  const std::vector<double> origin = {0.0, 0.0};
  const ImportanceVector at_origin = rcm_local(m, origin);
  CHECK(at_origin.scores == std::vector<double>{0.0, 0.0});

  const std::vector<double> x = {1.0, 4.0};
  const ImportanceVector iv = rcm_local(m, x);
  CHECK(iv.scores == std::vector<double>{2.0, 4.0});
  CHECK(rank_features(iv)[0] == 1);
}

TEST_CASE("rcm_local terms plus intercept reproduce the model logit") {
  const Dataset d = testsupport::make_planted_dataset(200, 4, 2, 7);
  const LogisticModel m = fit_logistic(d);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto x = d.row(i);
    const Eigen::VectorXd z = m.standardizer().transform_row(x);
    double total = m.intercept();
    for (Eigen::Index j = 0; j < z.size(); ++j) total += m.coefficients()[j] * z[j];
    CHECK(total == doctest::Approx(m.logit_one(x)).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// MDI
// ---------------------------------------------------------------------------

TEST_CASE("mdi of a single stump concentrates on its split feature") {
  const DecisionTree tree(make_stump(3, 0.0, 0.1, 0.9), 5);
  const ImportanceVector iv = mdi_global(tree);
  CHECK(iv.scores[3] == doctest::Approx(1.0));
  for (std::size_t j = 0; j < 5; ++j) {
    if (j != 3) CHECK(iv.scores[j] == 0.0);
  }
}

TEST_CASE("mdi averages across forest trees") {
  // Two stumps with equal impurity decrease on different features; leaves
  // carry zero impurity so each split's decrease equals the root impurity.
  std::vector<Tree> trees = {make_stump(0, 0.0, 0.0, 1.0), make_stump(1, 0.0, 0.0, 1.0)};
  const ForestModel forest(std::move(trees), 2);
  const ImportanceVector iv = mdi_global(forest);
  CHECK(iv.scores[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(iv.scores[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mdi normalizes to one for fitted models") {
  const Dataset d = testsupport::make_planted_dataset(300, 6, 2, 9);
  const auto sum_of = [](const ImportanceVector& iv) {
    return std::accumulate(iv.scores.begin(), iv.scores.end(), 0.0);
  };
  CHECK(sum_of(mdi_global(fit_tree(d))) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sum_of(mdi_global(fit_forest(d, {}, 1))) == doctest::Approx(1.0).epsilon(1e-9));
  BoostedConfig boosted;
  boosted.rounds = 20;
  CHECK(sum_of(mdi_global(fit_boosted(d, boosted))) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mdi of a model with no splits is the zero vector") {
  BoostedConfig config;
  config.rounds = 0;
  RowMatrix features(4, 2);
  features << -2, 0, -1, 0, 1, 0, 2, 0;
  const Dataset d = Dataset::create(features, {0, 0, 1, 1}, {"a", "b"});
  const BoostedModel m = fit_boosted(d, config);
  const ImportanceVector iv = mdi_global(m);
  CHECK(iv.scores == std::vector<double>{0.0, 0.0});
}

// ---------------------------------------------------------------------------
// SHAP
// ---------------------------------------------------------------------------

TEST_CASE("shap_exact matches the analytic linear-model attribution") {
  const LogisticModel m = make_logistic(0.25, {1.5, -2.0, 0.75, 0.0});
  const RowMatrix background = gaussian_background(40, 4, 3);
  std::mt19937_64 engine(5);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(4);
    for (double& v : x) v = gaussian(engine);
    const ShapleyExplanation explanation = shap_exact(m, x, background);
    for (std::size_t j = 0; j < 4; ++j) {
      const double expected =
          m.coefficients()[static_cast<Eigen::Index>(j)] *
          (x[j] - background.col(static_cast<Eigen::Index>(j)).mean());
      CHECK(explanation.phi[j] == doctest::Approx(expected).epsilon(1e-6));
    }
    // Feature with zero coefficient is provably ignored: missingness.
    CHECK(std::abs(explanation.phi[3]) < 1e-9);
  }
}

TEST_CASE("shap_exact on one feature gives phi = f(x) - base") {
  const Dataset d = testsupport::make_planted_dataset(50, 1, 1, 11);
  const LogisticModel m = fit_logistic(d);
  const std::vector<double> x = {1.3};
  const ShapleyExplanation explanation = shap_exact(m, x, d.features);
  CHECK(explanation.phi.size() == 1);
  CHECK(explanation.base_value + explanation.phi[0] ==
        doctest::Approx(m.explanation_output(x)).epsilon(1e-12));
}

TEST_CASE("shap_exact local accuracy holds for every model type") {
  const Dataset d = testsupport::make_planted_dataset(120, 6, 2, 17);
  ForestConfig forest_config;
  forest_config.n_trees = 10;
  BoostedConfig boosted_config;
  boosted_config.rounds = 15;

  std::vector<std::unique_ptr<Model>> models;
  models.push_back(std::make_unique<LogisticModel>(fit_logistic(d)));
  models.push_back(std::make_unique<DecisionTree>(fit_tree(d)));
  models.push_back(std::make_unique<ForestModel>(fit_forest(d, forest_config, 3)));
  models.push_back(std::make_unique<BoostedModel>(fit_boosted(d, boosted_config)));
  models.push_back(std::make_unique<AdditiveModel>(fit_additive(d)));

  const RowMatrix background = d.features.topRows(30);
  for (const auto& model : models) {
    for (std::size_t i = 0; i < 5; ++i) {
      const auto x = d.row(100 + i);
      const ShapleyExplanation explanation = shap_exact(*model, x, background);
      CHECK(explanation.total() ==
            doctest::Approx(model->explanation_output(x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("shap_exact missingness for a tree that ignores a feature") {
  const DecisionTree tree(make_stump(0, 0.0, 0.2, 0.8), 3);
  const RowMatrix background = gaussian_background(25, 3, 7);
  const std::vector<double> x = {0.5, -1.0, 2.0};
  const ShapleyExplanation explanation = shap_exact(tree, x, background);
  CHECK(explanation.phi[1] == 0.0);
  CHECK(explanation.phi[2] == 0.0);
  CHECK(explanation.phi[0] != 0.0);
}

TEST_CASE("shap consistency on dominating stumps") {
  // f' doubles the jump of f on feature 0. For instances on the stump's
  // right side, presence of feature 0 raises the output by the jump times
  // the background left-mass, for every subset; f' dominates that marginal
  // contribution, so phi_0 must not decrease.
  const DecisionTree f(make_stump(0, 0.0, 0.0, 0.4), 2);
  const DecisionTree f_prime(make_stump(0, 0.0, 0.0, 0.8), 2);
  const RowMatrix background = gaussian_background(30, 2, 13);
  std::mt19937_64 engine(19);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x = {std::abs(gaussian(engine)), gaussian(engine)};
    const double phi = shap_exact(f, x, background).phi[0];
    const double phi_prime = shap_exact(f_prime, x, background).phi[0];
    CHECK(phi_prime >= phi - 1e-12);
    CHECK(phi > 0.0);
  }
}

TEST_CASE("shap_sampled with full permutation enumeration equals exact at P=3") {
  const Dataset d = testsupport::make_planted_dataset(60, 3, 2, 23);
  BoostedConfig config;
  config.rounds = 10;
  const BoostedModel m = fit_boosted(d, config);
  const RowMatrix background = d.features.topRows(20);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto x = d.row(40 + i);
    const ShapleyExplanation exact = shap_exact(m, x, background);
    const ShapleyExplanation enumerated =
        shap_sampled(m, x, background, 0, 0, /*enumerate_all=*/true);
    CHECK(enumerated.n_permutations == 6);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(enumerated.phi[j] == doctest::Approx(exact.phi[j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("shap_sampled is deterministic in the seed") {
  const Dataset d = testsupport::make_planted_dataset(80, 4, 2, 29);
  const LogisticModel m = fit_logistic(d);
  const auto x = d.row(0);
  const ShapleyExplanation a = shap_sampled(m, x, d.features, 50, 99);
  const ShapleyExplanation b = shap_sampled(m, x, d.features, 50, 99);
  CHECK(a.phi == b.phi);
  const ShapleyExplanation c = shap_sampled(m, x, d.features, 50, 100);
  CHECK(a.phi != c.phi);
}

TEST_CASE("shap_sampled approximates the analytic values at P=8") {
  const LogisticModel m = make_logistic(0.0, {2.0, -1.5, 1.0, -0.7, 0.5, -0.3, 0.2, 0.1});
  const RowMatrix background = gaussian_background(25, 8, 31);
  std::mt19937_64 engine(37);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  std::vector<double> x(8);
  for (double& v : x) v = gaussian(engine);

  const ShapleyExplanation sampled = shap_sampled(m, x, background, 2000, 41);
  double max_abs_phi = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const double analytic = m.coefficients()[static_cast<Eigen::Index>(j)] *
                            (x[j] - background.col(static_cast<Eigen::Index>(j)).mean());
    max_abs_phi = std::max(max_abs_phi, std::abs(analytic));
  }
  for (std::size_t j = 0; j < 8; ++j) {
    const double analytic = m.coefficients()[static_cast<Eigen::Index>(j)] *
                            (x[j] - background.col(static_cast<Eigen::Index>(j)).mean());
    CHECK(std::abs(sampled.phi[j] - analytic) <= 0.05 * max_abs_phi);
  }
}

TEST_CASE("shap_exact guards its preconditions") {
  const LogisticModel m = make_logistic(0.0, std::vector<double>(16, 0.1));
  const std::vector<double> x(16, 0.0);
  const RowMatrix background = gaussian_background(5, 16, 1);
  CHECK_THROWS_AS(shap_exact(m, x, background), Error);  // 16 > default cap 15

  const LogisticModel small = make_logistic(0.0, {1.0});
  const std::vector<double> x1 = {0.0};
  CHECK_THROWS_AS(shap_exact(small, x1, RowMatrix(0, 1)), Error);  // empty background
}

TEST_CASE("shap_auto falls back to sampling above the exact cap") {
  const LogisticModel small = make_logistic(0.0, {1.0, -1.0, 0.5});
  const RowMatrix background3 = gaussian_background(10, 3, 71);
  const std::vector<double> x3 = {0.1, 0.2, 0.3};
  ShapOptions options;
  options.exact_max_features = 15;
  options.n_permutations = 30;
  CHECK(shap_auto(small, x3, background3, options).mode == ShapMode::Exact);

  std::vector<double> beta(16, 0.2);
  const LogisticModel wide = make_logistic(0.0, beta);
  const RowMatrix background16 = gaussian_background(10, 16, 73);
  const std::vector<double> x16(16, 0.5);
  const ShapleyExplanation sampled = shap_auto(wide, x16, background16, options);
  CHECK(sampled.mode == ShapMode::Sampled);
  CHECK(sampled.n_permutations == 30);
  CHECK(sampled.total() == doctest::Approx(wide.explanation_output(x16)).epsilon(1e-9));
}

TEST_CASE("shap_global aggregates absolute attributions") {
  const LogisticModel m = make_logistic(0.0, {1.0, -2.0});
  const RowMatrix background = RowMatrix::Zero(10, 2);

  RowMatrix single(1, 2);
  single << 1.0, 1.0;
  const ImportanceVector one = shap_global(m, single, background);
  const std::vector<double> instance = {1.0, 1.0};
  const ShapleyExplanation explanation = shap_exact(m, instance, background);
  CHECK(one.scores[0] == doctest::Approx(std::abs(explanation.phi[0])).epsilon(1e-12));
  CHECK(one.scores[1] == doctest::Approx(std::abs(explanation.phi[1])).epsilon(1e-12));

  // phi is linear here: phi_j = beta_j * x_j against a zero background, so
  // instances (1,1.5) and (3,-0.5) give |phi| rows [1,3] and [3,1].
  RowMatrix two(2, 2);
  two << 1.0, 1.5, 3.0, -0.5;
  const ImportanceVector mean_abs = shap_global(m, two, background);
  CHECK(mean_abs.scores[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(mean_abs.scores[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("shap_global is zero for ignored features") {
  const LogisticModel m = make_logistic(0.5, {1.2, 0.0, -0.8});
  const RowMatrix background = gaussian_background(15, 3, 43);
  const RowMatrix instances = gaussian_background(6, 3, 47);
  const ImportanceVector iv = shap_global(m, instances, background);
  CHECK(std::abs(iv.scores[1]) < 1e-9);
}

// ---------------------------------------------------------------------------
// LIME
// ---------------------------------------------------------------------------

TEST_CASE("lime on a constant model has zero coefficients") {
  const ConstantModel m(0.7, 3);
  const RowMatrix background = gaussian_background(20, 3, 53);
  const std::vector<double> x = {0.4, -0.2, 1.0};
  const LimeExplanation explanation = lime_local(m, x, background, {}, 7);
  for (double c : explanation.coefficients) {
    CHECK(std::abs(c) < 1e-6);
  }
  CHECK(explanation.intercept == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("lime recovers the dominant feature of a planted model") {
  const LogisticModel m = make_logistic(0.0, {4.0, 0.0});
  const RowMatrix background = gaussian_background(50, 2, 59);
  const std::vector<double> x = {1.5, -0.5};
  const LimeExplanation explanation = lime_local(m, x, background, {}, 11);
  CHECK(std::abs(explanation.coefficients[0]) > std::abs(explanation.coefficients[1]));
  CHECK(rank_features(explanation.importance())[0] == 0);
}

TEST_CASE("lime rejects all-identical presence draws") {
  // With one feature and two samples, half of all seeds draw the same
  // presence bit twice; find one deterministically and expect the guard.
  const ConstantModel m(0.5, 1);
  RowMatrix background(3, 1);
  background << -1.0, 0.0, 1.0;
  const std::vector<double> x = {0.25};
  LimeConfig config;
  config.n_samples = 2;
  bool triggered = false;
  for (std::uint64_t seed = 0; seed < 64 && !triggered; ++seed) {
    try {
      lime_local(m, x, background, config, seed);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateSamples);
      triggered = true;
    }
  }
  CHECK(triggered);
}

TEST_CASE("lime is deterministic in the seed") {
  const Dataset d = testsupport::make_planted_dataset(100, 4, 2, 61);
  const LogisticModel m = fit_logistic(d);
  const auto x = d.row(0);
  const LimeExplanation a = lime_local(m, x, d.features, {}, 3);
  const LimeExplanation b = lime_local(m, x, d.features, {}, 3);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.intercept == b.intercept);
  CHECK(a.kernel_width == doctest::Approx(0.75 * 2.0));  // 0.75 * sqrt(4)
  CHECK(a.n_samples == 1000);
}

// ---------------------------------------------------------------------------
// Additive self-explanation
// ---------------------------------------------------------------------------

TEST_CASE("additive explanations read the shape functions") {
  std::vector<ShapeFunction> shapes(2);
  shapes[0].edges = {};
  shapes[0].values = {0.0};  // identically zero
  shapes[1].edges = {0.0};
  shapes[1].values = {-1.5, 2.0};
  const AdditiveModel m(0.1, std::move(shapes), {0.0, 1.7});

  const std::vector<double> x = {3.0, -1.0};  // second feature falls in the -1.5 bin
  const ImportanceVector local = additive_local(m, x);
  CHECK(local.scores[0] == 0.0);
  CHECK(local.scores[1] == 1.5);

  const ImportanceVector global = additive_global(m);
  CHECK(global.scores[0] == 0.0);
  CHECK(global.scores[1] == 1.7);
}

TEST_CASE("additive global importance equals a brute-force pass over training rows") {
  const Dataset d = testsupport::make_planted_dataset(250, 5, 2, 67);
  const AdditiveModel m = fit_additive(d);
  for (std::size_t j = 0; j < d.cols(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      total += std::abs(m.shapes()[j].evaluate(
          d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    CHECK(m.global_importance()[j] ==
          doctest::Approx(total / static_cast<double>(d.rows())).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// Rank extraction
// ---------------------------------------------------------------------------

TEST_CASE("rank_features is deterministic and total") {
  CHECK(rank_features(std::vector<double>{0.5, 2.0, 1.0}) == RankVector{1, 2, 0});
  CHECK(rank_features(std::vector<double>{1.0, 1.0, 1.0}) == RankVector{0, 1, 2});
  CHECK(rank_features(std::vector<double>{}) == RankVector{});
  CHECK(rank_features(std::vector<double>{3.0, 3.0, 4.0, 1.0}) == RankVector{2, 0, 1, 3});
}
