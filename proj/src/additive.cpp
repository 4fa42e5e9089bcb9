#include <algorithm>
#include <cmath>

#include "rankstab/error.hpp"
#include "rankstab/models.hpp"
#include "rankstab/rankmetrics.hpp"

namespace rankstab {

namespace {

std::vector<double> quantile_edges(std::vector<double> column, int bins) {
  std::sort(column.begin(), column.end());
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    const double edge =
        percentile_sorted(column, 100.0 * static_cast<double>(k) / static_cast<double>(bins));
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

}  // namespace

AdditiveModel fit_additive(const Dataset& d, const AdditiveConfig& config) {
  if (config.bins < 2 || config.cycles < 0 || config.learning_rate <= 0.0) {
    raise(ErrorCode::ConfigInvalid, "additive config needs bins >= 2, cycles >= 0, rate > 0");
  }
  const std::size_t m = d.rows();
  const std::size_t p = d.cols();

  std::vector<ShapeFunction> shapes(p);
  // Row-to-bin map per feature, fixed for the whole fit.
  std::vector<std::vector<std::size_t>> row_bins(p, std::vector<std::size_t>(m));
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> column(m);
    for (std::size_t i = 0; i < m; ++i) {
      column[i] = d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    shapes[j].edges = quantile_edges(column, config.bins);
    shapes[j].values.assign(shapes[j].edges.size() + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) row_bins[j][i] = shapes[j].bin_index(column[i]);
  }

  double positives = 0.0;
  for (int y : d.labels) positives += y;
  double intercept = std::log(positives / (static_cast<double>(m) - positives));

  std::vector<double> scores(m, intercept);
  std::vector<double> bin_sum;
  std::vector<std::size_t> bin_count;

  // Cyclic boosting: one depth-1 stump per feature per cycle, fit to the
  // current logistic-loss residuals, damped by the learning rate.
  for (int cycle = 0; cycle < config.cycles; ++cycle) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t n_bins = shapes[j].values.size();
      if (n_bins < 2) continue;  // constant column, nothing to split

      bin_sum.assign(n_bins, 0.0);
      bin_count.assign(n_bins, 0);
      double total_sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double residual = static_cast<double>(d.labels[i]) - sigmoid(scores[i]);
        bin_sum[row_bins[j][i]] += residual;
        bin_count[row_bins[j][i]] += 1;
        total_sum += residual;
      }

      // Best boundary between bins by squared-error reduction.
      double best_gain = -1.0;
      std::size_t best_boundary = 0;
      double left_sum = 0.0;
      std::size_t left_count = 0;
      for (std::size_t boundary = 1; boundary < n_bins; ++boundary) {
        left_sum += bin_sum[boundary - 1];
        left_count += bin_count[boundary - 1];
        const std::size_t right_count = m - left_count;
        if (left_count == 0 || right_count == 0) continue;
        const double right_sum = total_sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_count) +
                            right_sum * right_sum / static_cast<double>(right_count);
        if (gain > best_gain) {
          best_gain = gain;
          best_boundary = boundary;
        }
      }
      if (best_boundary == 0) continue;

      double leading_sum = 0.0;
      std::size_t leading_count = 0;
      for (std::size_t b = 0; b < best_boundary; ++b) {
        leading_sum += bin_sum[b];
        leading_count += bin_count[b];
      }
      const double left_step =
          config.learning_rate * leading_sum / static_cast<double>(leading_count);
      const double right_step = config.learning_rate * (total_sum - leading_sum) /
                                static_cast<double>(m - leading_count);
      for (std::size_t b = 0; b < n_bins; ++b) {
        shapes[j].values[b] += b < best_boundary ? left_step : right_step;
      }
      for (std::size_t i = 0; i < m; ++i) {
        scores[i] += row_bins[j][i] < best_boundary ? left_step : right_step;
        if (!std::isfinite(scores[i])) {
          raise(ErrorCode::NonFinite, "additive scores diverged");
        }
      }
    }
  }

  // Center each shape function over the training rows; the removed mass moves
  // into the intercept so predictions are unchanged.
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += shapes[j].values[row_bins[j][i]];
    mean /= static_cast<double>(m);
    for (double& v : shapes[j].values) v -= mean;
    intercept += mean;
  }

  std::vector<double> global_importance(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += std::abs(shapes[j].values[row_bins[j][i]]);
    global_importance[j] = total / static_cast<double>(m);
  }

  return AdditiveModel(intercept, std::move(shapes), std::move(global_importance));
}

}  // namespace rankstab
