#include "rankstab/lime.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

#include "rankstab/error.hpp"

namespace rankstab {

ImportanceVector LimeExplanation::importance() const {
  std::vector<double> scores(coefficients.size());
  for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = std::abs(coefficients[j]);
  return ImportanceVector{std::move(scores), Scope::Local, instance_id};
}

LimeExplanation lime_local(const Model& model, std::span<const double> x,
                           const RowMatrix& background, const LimeConfig& config,
                           std::uint64_t seed) {
  if (background.rows() == 0) {
    raise(ErrorCode::EmptyBackground, "LIME needs a non-empty background dataset");
  }
  const std::size_t p = model.feature_count();
  if (x.size() != p || static_cast<std::size_t>(background.cols()) != p) {
    raise(ErrorCode::WidthMismatch, "instance/background width does not match model");
  }
  if (config.n_samples < 2) {
    raise(ErrorCode::ConfigInvalid, "LIME needs at least 2 samples");
  }
  const double width = config.kernel_width > 0.0
                           ? config.kernel_width
                           : 0.75 * std::sqrt(static_cast<double>(p));

  const Eigen::VectorXd column_means = background.colwise().mean();

  const std::size_t n = config.n_samples;
  Eigen::MatrixXd design(n, p + 1);  // leading column of ones for the intercept
  Eigen::VectorXd response(n);
  Eigen::VectorXd sample_weight(n);
  std::vector<double> hybrid(p);
  std::vector<std::uint8_t> present(p);

  std::mt19937_64 engine(seed);
  std::uint64_t bits = 0;
  int bits_left = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t hamming = 0;  // distance from the all-ones vector
    for (std::size_t j = 0; j < p; ++j) {
      if (bits_left == 0) {
        bits = engine();
        bits_left = 64;
      }
      present[j] = static_cast<std::uint8_t>(bits & 1u);
      bits >>= 1;
      --bits_left;
      hamming += present[j] ? 0 : 1;
    }
    for (std::size_t j = 0; j < p; ++j) {
      hybrid[j] = present[j] ? x[j] : column_means[static_cast<Eigen::Index>(j)];
      design(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j) + 1) =
          static_cast<double>(present[j]);
    }
    design(static_cast<Eigen::Index>(s), 0) = 1.0;
    response[static_cast<Eigen::Index>(s)] = model.predict_proba_one(hybrid);
    const double h = static_cast<double>(hamming);
    sample_weight[static_cast<Eigen::Index>(s)] = std::exp(-h * h / (width * width));
  }

  // All-identical presence draws would make the weighted system rank
  // deficient beyond what the ridge handles meaningfully.
  bool varied = false;
  for (Eigen::Index s = 1; s < design.rows() && !varied; ++s) {
    varied = (design.row(s).tail(p).array() != design.row(0).tail(p).array()).any();
  }
  if (!varied) {
    raise(ErrorCode::DegenerateSamples, "all presence vectors identical");
  }

  // Weighted ridge; the intercept is unpenalized.
  Eigen::MatrixXd normal =
      design.transpose() * sample_weight.asDiagonal() * design;
  for (Eigen::Index j = 1; j <= static_cast<Eigen::Index>(p); ++j) {
    normal(j, j) += config.ridge;
  }
  normal(0, 0) += 1e-12;
  const Eigen::VectorXd rhs = design.transpose() * (sample_weight.asDiagonal() * response);
  const Eigen::VectorXd solution = normal.ldlt().solve(rhs);

  LimeExplanation explanation;
  explanation.intercept = solution[0];
  explanation.coefficients.assign(solution.data() + 1, solution.data() + 1 + p);
  explanation.kernel_width = width;
  explanation.n_samples = n;
  return explanation;
}

LimeExplanation lime_local(const Model& model, std::span<const double> x,
                           const Dataset& background, const LimeConfig& config,
                           std::uint64_t seed) {
  return lime_local(model, x, background.features, config, seed);
}

}  // namespace rankstab
