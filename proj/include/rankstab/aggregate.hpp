#pragma once

#include <string>
#include <vector>

#include "rankstab/experiment.hpp"
#include "rankstab/rankmetrics.hpp"

namespace rankstab {

/// One (dataset, method, scope, proportion) cell. Stability and pMode are
/// computed over the cell's replicate rank vectors (local scope: averaged
/// over probes). Intervals are 10/90 percentile bands: across replicate F1
/// values for F1, and across leave-one-replicate-out values for stability.
struct CurveRow {
  std::string dataset_id;
  std::string method_id;
  Scope scope = Scope::Global;
  std::size_t p_index = 0;
  double proportion = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_error = 0;
  double mean_f1 = 0.0;
  PerturbationInterval f1_interval;
  double stability_value = 0.0;
  PerturbationInterval stability_interval;
  double p_mode_value = 0.0;
};

/// Per (method, scope, accuracy bucket) averages across curve cells. Cells
/// land in the bucket of their mean F1; unbucketed cells (mean F1 < 0.5) are
/// dropped. Buckets with no cells are still reported with cell_count 0 and
/// NaN means.
struct BucketSummary {
  std::string method_id;
  Scope scope = Scope::Global;
  BucketLabel bucket = BucketLabel::Low;
  std::size_t cell_count = 0;
  double mean_stability = 0.0;
  PerturbationInterval stability_interval;
  double mean_p_mode = 0.0;
  PerturbationInterval p_mode_interval;
};

/// Normalized distribution of cell stability values within a bucket.
struct StabilityHistogram {
  std::string method_id;
  Scope scope = Scope::Global;
  BucketLabel bucket = BucketLabel::Low;
  std::size_t cell_count = 0;
  std::vector<double> mass;  // one entry per bin over [0,1], sums to 1
};

std::vector<CurveRow> aggregate_curves(const std::vector<TrialRecord>& records,
                                       std::size_t truncation = 10);

std::vector<BucketSummary> aggregate_buckets(const std::vector<CurveRow>& curves);
std::vector<BucketSummary> aggregate_buckets(const std::vector<TrialRecord>& records,
                                             std::size_t truncation = 10);

std::vector<StabilityHistogram> histogram_data(const std::vector<CurveRow>& curves,
                                               std::size_t bins = 20);
std::vector<StabilityHistogram> histogram_data(const std::vector<TrialRecord>& records,
                                               std::size_t bins = 20,
                                               std::size_t truncation = 10);

}  // namespace rankstab
