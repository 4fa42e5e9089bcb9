#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankstab {

/// Row-major so that a single instance is a contiguous span.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Numeric feature matrix with binary labels and named columns.
/// Construction via `create` enforces: finite entries, labels in {0,1} with
/// both classes present, and unique feature names matching the column count.
struct Dataset {
  RowMatrix features;                      // M x P
  std::vector<int> labels;                 // length M
  std::vector<std::string> feature_names;  // length P

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * cols(), cols()};
  }

  static Dataset create(RowMatrix features, std::vector<int> labels,
                        std::vector<std::string> feature_names);
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

/// Per-feature affine transform fitted on training data. Constant columns
/// get stddev 1 so they map to all-zero instead of dividing by zero.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  std::size_t cols() const { return static_cast<std::size_t>(mean.size()); }
  Eigen::VectorXd transform_row(std::span<const double> x) const;
};

Dataset load_csv(const std::string& path, const std::string& label_column);

/// Uniformly random row partition, deterministic in `seed`. Redraws (up to a
/// bounded number of attempts) until both partitions contain both classes.
SplitPair train_test_split(const Dataset& d, double train_fraction, std::uint64_t seed);

/// One with-replacement draw of ceil(proportion * |train|) rows, redrawn
/// (bounded) while single-class.
Dataset subsample_bootstrap(const Dataset& train, double proportion, std::uint64_t seed);

Standardizer fit_standardizer(const Dataset& d);
Dataset apply_standardizer(const Standardizer& s, const Dataset& d);

}  // namespace rankstab
