#include "rankstab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "rankstab/error.hpp"

namespace rankstab {

namespace {

constexpr int kStratifyRetries = 50;

bool has_both_classes(const std::vector<int>& labels) {
  bool zero = false;
  bool one = false;
  for (int y : labels) {
    zero |= (y == 0);
    one |= (y == 1);
    if (zero && one) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    raise(ErrorCode::ParseError,
          "row " + std::to_string(row) + ", column " + std::to_string(col) +
              ": cannot parse '" + cell + "' as a real number");
  }
  if (!std::isfinite(value)) {
    raise(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " +
                                     std::to_string(col) + ": non-finite value '" + cell + "'");
  }
  return value;
}

Dataset take_rows(const Dataset& source, const std::vector<std::size_t>& indices) {
  RowMatrix features(static_cast<Eigen::Index>(indices.size()), source.features.cols());
  std::vector<int> labels(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) =
        source.features.row(static_cast<Eigen::Index>(indices[i]));
    labels[i] = source.labels[indices[i]];
  }
  return Dataset::create(std::move(features), std::move(labels), source.feature_names);
}

}  // namespace

Dataset Dataset::create(RowMatrix features, std::vector<int> labels,
                        std::vector<std::string> feature_names) {
  const auto rows = static_cast<std::size_t>(features.rows());
  const auto cols = static_cast<std::size_t>(features.cols());
  if (rows == 0 || cols == 0) {
    raise(ErrorCode::EmptyDataset, "dataset has no rows or no feature columns");
  }
  if (labels.size() != rows) {
    raise(ErrorCode::LengthMismatch, "label count " + std::to_string(labels.size()) +
                                         " does not match row count " + std::to_string(rows));
  }
  if (feature_names.size() != cols) {
    raise(ErrorCode::LengthMismatch,
          "feature name count " + std::to_string(feature_names.size()) +
              " does not match column count " + std::to_string(cols));
  }
  if (!features.allFinite()) {
    raise(ErrorCode::NonFinite, "feature matrix contains NaN or infinite entries");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      raise(ErrorCode::ParseError, "labels must be 0 or 1, got " + std::to_string(y));
    }
  }
  if (!has_both_classes(labels)) {
    raise(ErrorCode::SingleClassDataset, "dataset contains a single label class");
  }
  std::set<std::string> unique_names(feature_names.begin(), feature_names.end());
  if (unique_names.size() != feature_names.size()) {
    raise(ErrorCode::ParseError, "feature names are not unique");
  }
  Dataset d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.feature_names = std::move(feature_names);
  return d;
}

Eigen::VectorXd Standardizer::transform_row(std::span<const double> x) const {
  if (x.size() != cols()) {
    raise(ErrorCode::WidthMismatch, "instance width " + std::to_string(x.size()) +
                                        " does not match standardizer width " +
                                        std::to_string(cols()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out[j] = (x[static_cast<std::size_t>(j)] - mean[j]) / stddev[j];
  }
  return out;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::DatasetLoad, "cannot open file '" + path + "'");
  }
  std::string header;
  if (!std::getline(in, header)) {
    raise(ErrorCode::EmptyDataset, "file '" + path + "' is empty");
  }
  const std::vector<std::string> columns = split_line(header);
  std::size_t label_index = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == label_column) {
      label_index = i;
      break;
    }
  }
  if (label_index == columns.size()) {
    raise(ErrorCode::MissingColumn, "label column '" + label_column + "' not found in header");
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i != label_index) names.push_back(columns[i]);
  }

  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;  // 1-based data row number, header excluded
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != columns.size()) {
      raise(ErrorCode::ParseError, "row " + std::to_string(row) + ": expected " +
                                       std::to_string(columns.size()) + " cells, got " +
                                       std::to_string(cells.size()));
    }
    for (std::size_t col = 0; col < cells.size(); ++col) {
      const double v = parse_cell(cells[col], row, col);
      if (col == label_index) {
        if (v != 0.0 && v != 1.0) {
          raise(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " +
                                           std::to_string(col) + ": label must be 0 or 1, got '" +
                                           cells[col] + "'");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  if (labels.empty()) {
    raise(ErrorCode::EmptyDataset, "file '" + path + "' has a header but no data rows");
  }

  const std::size_t cols = names.size();
  RowMatrix features(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  return Dataset::create(std::move(features), std::move(labels), std::move(names));
}

SplitPair train_test_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    raise(ErrorCode::ConfigInvalid,
          "train_fraction must be in (0, 1), got " + std::to_string(train_fraction));
  }
  const std::size_t m = d.rows();
  if (m < 10) {
    raise(ErrorCode::ConfigInvalid, "train_test_split requires at least 10 rows, got " +
                                        std::to_string(m));
  }
  const auto train_size = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m)));
  if (train_size == 0 || train_size == m) {
    raise(ErrorCode::ConfigInvalid, "train_fraction leaves an empty partition");
  }

  std::mt19937_64 engine(seed);
  std::vector<std::size_t> indices(m);
  for (int attempt = 0; attempt < kStratifyRetries; ++attempt) {
    std::iota(indices.begin(), indices.end(), 0);
    std::shuffle(indices.begin(), indices.end(), engine);
    bool train_zero = false, train_one = false, test_zero = false, test_one = false;
    for (std::size_t i = 0; i < m; ++i) {
      const int y = d.labels[indices[i]];
      if (i < train_size) {
        train_zero |= (y == 0);
        train_one |= (y == 1);
      } else {
        test_zero |= (y == 0);
        test_one |= (y == 1);
      }
    }
    if (train_zero && train_one && test_zero && test_one) {
      std::vector<std::size_t> train_idx(indices.begin(),
                                         indices.begin() + static_cast<std::ptrdiff_t>(train_size));
      std::vector<std::size_t> test_idx(indices.begin() + static_cast<std::ptrdiff_t>(train_size),
                                        indices.end());
      SplitPair pair;
      pair.train = take_rows(d, train_idx);
      pair.test = take_rows(d, test_idx);
      pair.seed = seed;
      return pair;
    }
  }
  raise(ErrorCode::CannotStratify,
        "could not draw a two-class train/test partition in " +
            std::to_string(kStratifyRetries) + " attempts");
}

Dataset subsample_bootstrap(const Dataset& train, double proportion, std::uint64_t seed) {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    raise(ErrorCode::ConfigInvalid,
          "proportion must be in (0, 1], got " + std::to_string(proportion));
  }
  const std::size_t m = train.rows();
  const auto sample_size =
      static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(m)));

  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<std::size_t> indices(sample_size);
  for (int attempt = 0; attempt < kStratifyRetries; ++attempt) {
    for (auto& idx : indices) idx = pick(engine);
    bool zero = false, one = false;
    for (std::size_t idx : indices) {
      const int y = train.labels[idx];
      zero |= (y == 0);
      one |= (y == 1);
    }
    if (zero && one) return take_rows(train, indices);
  }
  raise(ErrorCode::CannotStratify, "could not draw a two-class bootstrap sample in " +
                                       std::to_string(kStratifyRetries) + " attempts");
}

Standardizer fit_standardizer(const Dataset& d) {
  const auto m = static_cast<double>(d.rows());
  Standardizer s;
  s.mean = d.features.colwise().mean();
  s.stddev.resize(d.features.cols());
  for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
    const double var = (d.features.col(j).array() - s.mean[j]).square().sum() / m;
    const double sd = std::sqrt(var);
    s.stddev[j] = sd > 0.0 ? sd : 1.0;  // constant columns map to all-zero
  }
  return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& d) {
  if (s.cols() != d.cols()) {
    raise(ErrorCode::WidthMismatch, "standardizer width " + std::to_string(s.cols()) +
                                        " does not match dataset width " + std::to_string(d.cols()));
  }
  RowMatrix transformed = d.features;
  for (Eigen::Index j = 0; j < transformed.cols(); ++j) {
    transformed.col(j) = (transformed.col(j).array() - s.mean[j]) / s.stddev[j];
  }
  return Dataset::create(std::move(transformed), d.labels, d.feature_names);
}

}  // namespace rankstab
