#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "rankstab/dataset.hpp"
#include "rankstab/error.hpp"
#include "synth.hpp"

using namespace rankstab;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_csv(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "rankstab-test-data";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ConfigInvalid;
}

std::multiset<std::vector<double>> row_multiset(const Dataset& d) {
  std::multiset<std::vector<double>> rows;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    rows.insert(std::vector<double>(d.row(i).begin(), d.row(i).end()));
  }
  return rows;
}

}  // namespace

TEST_CASE("load_csv parses a small file") {
  const auto path = write_temp_csv("basic.csv",
                                   "a,b,y\n"
                                   "1.5,2,0\n"
                                   "3,4,1\n"
                                   "5,6.25,0\n"
                                   "7,8,1\n");
  const Dataset d = load_csv(path.string(), "y");
  CHECK(d.rows() == 4);
  CHECK(d.cols() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.features(0, 0) == 1.5);
  CHECK(d.features(2, 1) == 6.25);
  CHECK(d.labels == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("load_csv keeps column order with an interior label column") {
  const auto path = write_temp_csv("interior.csv",
                                   "a,y,b\n"
                                   "1,0,2\n"
                                   "3,1,4\n");
  const Dataset d = load_csv(path.string(), "y");
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.features(0, 0) == 1.0);
  CHECK(d.features(0, 1) == 2.0);
}

TEST_CASE("load_csv error paths") {
  const auto missing = write_temp_csv("missing.csv", "a,b\n1,2\n");
  CHECK(code_of([&] { load_csv(missing.string(), "y"); }) == ErrorCode::MissingColumn);

  const auto bad_label = write_temp_csv("badlabel.csv", "a,y\n1,0\n2,2\n");
  CHECK(code_of([&] { load_csv(bad_label.string(), "y"); }) == ErrorCode::ParseError);

  const auto single_class = write_temp_csv("single.csv", "a,y\n1,0\n2,0\n");
  CHECK(code_of([&] { load_csv(single_class.string(), "y"); }) == ErrorCode::SingleClassDataset);

  const auto bad_cell = write_temp_csv("badcell.csv", "a,y\n1,0\nfoo,1\n");
  CHECK(code_of([&] { load_csv(bad_cell.string(), "y"); }) == ErrorCode::ParseError);

  const auto nan_cell = write_temp_csv("nancell.csv", "a,y\nnan,0\n2,1\n");
  CHECK(code_of([&] { load_csv(nan_cell.string(), "y"); }) == ErrorCode::ParseError);

  const auto empty = write_temp_csv("empty.csv", "");
  CHECK(code_of([&] { load_csv(empty.string(), "y"); }) == ErrorCode::EmptyDataset);

  const auto header_only = write_temp_csv("header.csv", "a,y\n");
  CHECK(code_of([&] { load_csv(header_only.string(), "y"); }) == ErrorCode::EmptyDataset);

  const auto ragged = write_temp_csv("ragged.csv", "a,b,y\n1,2,0\n1,1\n");
  CHECK(code_of([&] { load_csv(ragged.string(), "y"); }) == ErrorCode::ParseError);

  CHECK(code_of([&] { load_csv("/nonexistent/nope.csv", "y"); }) == ErrorCode::DatasetLoad);
}

TEST_CASE("train_test_split sizes follow the floor rule") {
  const Dataset d = testsupport::make_planted_dataset(10, 3, 1, 1);
  const SplitPair split = train_test_split(d, 0.7, 99);
  CHECK(split.train.rows() == 7);
  CHECK(split.test.rows() == 3);
  CHECK(split.seed == 99);
}

TEST_CASE("train_test_split is deterministic and disjoint") {
  const Dataset d = testsupport::make_planted_dataset(60, 4, 2, 5);
  const SplitPair a = train_test_split(d, 0.7, 123);
  const SplitPair b = train_test_split(d, 0.7, 123);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.features == b.test.features);
  CHECK(a.train.labels == b.train.labels);

  // Union of parts is the original row multiset.
  auto rows = row_multiset(a.train);
  const auto test_rows = row_multiset(a.test);
  rows.insert(test_rows.begin(), test_rows.end());
  CHECK(rows == row_multiset(d));
}

TEST_CASE("train_test_split keeps both classes in both partitions") {
  const Dataset d = testsupport::make_planted_dataset(100, 3, 1, 21);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SplitPair split = train_test_split(d, 0.7, seed);
    const auto has_both = [](const std::vector<int>& labels) {
      bool zero = false, one = false;
      for (int y : labels) {
        zero |= y == 0;
        one |= y == 1;
      }
      return zero && one;
    };
    CHECK(has_both(split.train.labels));
    CHECK(has_both(split.test.labels));
  }
}

TEST_CASE("train_test_split precondition violations") {
  const Dataset small = testsupport::make_planted_dataset(9, 2, 1, 3);
  CHECK_THROWS_AS(train_test_split(small, 0.7, 0), Error);
  const Dataset d = testsupport::make_planted_dataset(20, 2, 1, 3);
  CHECK_THROWS_AS(train_test_split(d, 0.0, 0), Error);
  CHECK_THROWS_AS(train_test_split(d, 1.0, 0), Error);
}

TEST_CASE("subsample_bootstrap draws ceil(p*M) rows with replacement") {
  const Dataset d = testsupport::make_planted_dataset(100, 3, 1, 7);
  const Dataset s = subsample_bootstrap(d, 0.3, 42);
  CHECK(s.rows() == 30);

  const Dataset full = subsample_bootstrap(d, 1.0, 42);
  CHECK(full.rows() == 100);
  // An ordinary bootstrap repeats rows with overwhelming probability.
  std::set<std::vector<double>> unique_rows;
  for (std::size_t i = 0; i < full.rows(); ++i) {
    unique_rows.insert(std::vector<double>(full.row(i).begin(), full.row(i).end()));
  }
  CHECK(unique_rows.size() < full.rows());
}

TEST_CASE("subsample_bootstrap ceil sizes over a proportion grid") {
  const Dataset d = testsupport::make_planted_dataset(97, 2, 1, 11);
  for (double p : {0.1, 0.15, 0.2, 0.33, 0.5, 0.75, 0.9, 1.0}) {
    const Dataset s = subsample_bootstrap(d, p, 1);
    CHECK(s.rows() == static_cast<std::size_t>(std::ceil(p * 97.0)));
  }
}

TEST_CASE("subsample_bootstrap is deterministic per seed and varies across seeds") {
  const Dataset d = testsupport::make_planted_dataset(100, 3, 1, 13);
  const Dataset a = subsample_bootstrap(d, 0.5, 7);
  const Dataset b = subsample_bootstrap(d, 0.5, 7);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  const Dataset c = subsample_bootstrap(d, 0.5, 8);
  CHECK(row_multiset(a) != row_multiset(c));
}

TEST_CASE("resampling gives up when a two-class draw is impossible") {
  // One positive among ten rows: any 7-3 partition leaves one side
  // single-class, and a single-row bootstrap sample always is.
  RowMatrix features(10, 1);
  for (int i = 0; i < 10; ++i) features(i, 0) = i;
  std::vector<int> labels(10, 0);
  labels[4] = 1;
  const Dataset d = Dataset::create(std::move(features), std::move(labels), {"x"});

  CHECK(code_of([&] { train_test_split(d, 0.7, 0); }) == ErrorCode::CannotStratify);
  CHECK(code_of([&] { subsample_bootstrap(d, 0.1, 0); }) == ErrorCode::CannotStratify);
}

TEST_CASE("subsample_bootstrap rejects bad proportions") {
  const Dataset d = testsupport::make_planted_dataset(20, 2, 1, 3);
  CHECK_THROWS_AS(subsample_bootstrap(d, 0.0, 0), Error);
  CHECK_THROWS_AS(subsample_bootstrap(d, 1.5, 0), Error);
}

TEST_CASE("standardizer centers and scales the fitting data") {
  RowMatrix features(3, 2);
  features << 1, 5,
              2, 5,
              3, 5;
  const Dataset d = Dataset::create(features, {0, 1, 0}, {"a", "b"});
  const Standardizer s = fit_standardizer(d);
  CHECK(s.mean[0] == doctest::Approx(2.0));
  CHECK(s.stddev[1] == 1.0);  // constant column convention

  const Dataset t = apply_standardizer(s, d);
  CHECK(std::abs(t.features.col(0).mean()) < 1e-12);
  const double sd =
      std::sqrt((t.features.col(0).array() - t.features.col(0).mean()).square().sum() / 3.0);
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
  // Constant column maps to all-zero.
  CHECK(t.features.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardizer fitted on train does not center test data") {
  const Dataset d = testsupport::make_planted_dataset(50, 3, 1, 17);
  const SplitPair split = train_test_split(d, 0.7, 1);
  const Standardizer s = fit_standardizer(split.train);
  const Dataset t = apply_standardizer(s, split.test);
  // Not exactly centered: the transform is the train transform.
  double max_abs_mean = 0.0;
  for (Eigen::Index j = 0; j < t.features.cols(); ++j) {
    max_abs_mean = std::max(max_abs_mean, std::abs(t.features.col(j).mean()));
  }
  CHECK(max_abs_mean > 1e-6);
}

TEST_CASE("dataset invariants are enforced at construction") {
  RowMatrix features(2, 2);
  features << 1, 2, 3, 4;
  CHECK_THROWS_AS(Dataset::create(features, {0, 0}, {"a", "b"}), Error);   // single class
  CHECK_THROWS_AS(Dataset::create(features, {0, 2}, {"a", "b"}), Error);   // bad label
  CHECK_THROWS_AS(Dataset::create(features, {0, 1}, {"a", "a"}), Error);   // duplicate names
  CHECK_THROWS_AS(Dataset::create(features, {0, 1}, {"a"}), Error);        // name count
  RowMatrix with_nan = features;
  with_nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(Dataset::create(with_nan, {0, 1}, {"a", "b"}), Error);
  CHECK_THROWS_AS(Dataset::create(RowMatrix(0, 2), {}, {"a", "b"}), Error);  // empty
}
