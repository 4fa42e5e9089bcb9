#include "rankstab/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "rankstab/error.hpp"

namespace rankstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PerturbationInterval degenerate_interval(double value) {
  PerturbationInterval interval;
  interval.center = value;
  interval.lower = value;
  interval.upper = value;
  return interval;
}

PerturbationInterval interval_or_degenerate(const std::vector<double>& values) {
  if (values.size() < 2) {
    return degenerate_interval(values.empty() ? kNaN : values[0]);
  }
  return perturbation_interval(values);
}

/// Stability of a set of rankings plus its leave-one-out values, computed
/// from one pass over the pairwise distance matrix.
struct StabilityWithLoo {
  double value = 0.0;
  std::vector<double> loo;  // one value per ranking; empty when n < 3
};

StabilityWithLoo stability_with_loo(const std::vector<RankVector>& rankings,
                                    std::size_t truncation) {
  const std::size_t n = rankings.size();
  if (n < 2) {
    raise(ErrorCode::TooFewRankings, "cell has fewer than 2 usable rankings");
  }
  std::vector<double> row_sums(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = wkt_distance(rankings[i], rankings[j], truncation);
      total += d;
      row_sums[i] += d;
      row_sums[j] += d;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  StabilityWithLoo out;
  out.value = 1.0 - total / pairs;
  if (n >= 3) {
    const double loo_pairs = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
    out.loo.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      out.loo[r] = 1.0 - (total - row_sums[r]) / loo_pairs;
    }
  }
  return out;
}

struct CellKey {
  std::string dataset_id;
  std::string method_id;
  std::size_t p_index;

  bool operator<(const CellKey& other) const {
    if (dataset_id != other.dataset_id) return dataset_id < other.dataset_id;
    if (method_id != other.method_id) return method_id < other.method_id;
    return p_index < other.p_index;
  }
};

/// Canonical feature-name -> index mapping over everything the records
/// mention, so aggregation behaves identically whether it runs in-process or
/// from a reloaded records file.
std::map<std::string, int> build_name_index(const std::vector<TrialRecord>& records) {
  std::set<std::string> names;
  for (const TrialRecord& record : records) {
    if (record.global_ranks) {
      names.insert(record.global_ranks->begin(), record.global_ranks->end());
    }
    if (record.local_ranks) {
      for (const auto& ranks : *record.local_ranks) {
        names.insert(ranks.begin(), ranks.end());
      }
    }
  }
  std::map<std::string, int> index;
  int next = 0;
  for (const std::string& name : names) index[name] = next++;
  return index;
}

RankVector to_indices(const std::vector<std::string>& names,
                      const std::map<std::string, int>& index) {
  RankVector ranks;
  ranks.reserve(names.size());
  for (const std::string& name : names) ranks.push_back(index.at(name));
  return ranks;
}

struct ScopeMetrics {
  std::size_t n_ok = 0;
  double mean_f1 = 0.0;
  PerturbationInterval f1_interval;
  double stability_value = 0.0;
  PerturbationInterval stability_interval;
  double p_mode_value = 0.0;
};

ScopeMetrics global_scope_metrics(const std::vector<const TrialRecord*>& ok_records,
                                  const std::map<std::string, int>& name_index,
                                  std::size_t truncation) {
  std::vector<RankVector> rankings;
  std::vector<double> f1s;
  for (const TrialRecord* record : ok_records) {
    rankings.push_back(to_indices(*record->global_ranks, name_index));
    f1s.push_back(record->f1);
  }
  const StabilityWithLoo stab = stability_with_loo(rankings, truncation);

  ScopeMetrics metrics;
  metrics.n_ok = ok_records.size();
  metrics.f1_interval = interval_or_degenerate(f1s);
  metrics.mean_f1 = metrics.f1_interval.center;
  metrics.stability_value = stab.value;
  metrics.stability_interval =
      stab.loo.empty() ? degenerate_interval(stab.value) : perturbation_interval(stab.loo);
  metrics.p_mode_value = p_mode(rankings).p_mode;
  return metrics;
}

ScopeMetrics local_scope_metrics(const std::vector<const TrialRecord*>& ok_records,
                                 const std::map<std::string, int>& name_index,
                                 std::size_t truncation) {
  const std::size_t n = ok_records.size();
  const std::size_t probes = (*ok_records.front()->local_ranks).size();
  std::vector<double> f1s;
  for (const TrialRecord* record : ok_records) f1s.push_back(record->f1);

  double stability_sum = 0.0;
  double p_mode_sum = 0.0;
  std::vector<double> loo_stability(n, 0.0);
  bool have_loo_stability = true;

  for (std::size_t probe = 0; probe < probes; ++probe) {
    std::vector<RankVector> rankings;
    rankings.reserve(n);
    for (const TrialRecord* record : ok_records) {
      rankings.push_back(to_indices((*record->local_ranks)[probe], name_index));
    }
    const StabilityWithLoo stab = stability_with_loo(rankings, truncation);
    stability_sum += stab.value;
    p_mode_sum += p_mode(rankings).p_mode;
    if (stab.loo.empty()) {
      have_loo_stability = false;
    } else {
      for (std::size_t r = 0; r < n; ++r) loo_stability[r] += stab.loo[r];
    }
  }

  ScopeMetrics metrics;
  metrics.n_ok = n;
  metrics.f1_interval = interval_or_degenerate(f1s);
  metrics.mean_f1 = metrics.f1_interval.center;
  metrics.stability_value = stability_sum / static_cast<double>(probes);
  metrics.p_mode_value = p_mode_sum / static_cast<double>(probes);
  if (have_loo_stability) {
    for (double& v : loo_stability) v /= static_cast<double>(probes);
    metrics.stability_interval = perturbation_interval(loo_stability);
  } else {
    metrics.stability_interval = degenerate_interval(metrics.stability_value);
  }
  return metrics;
}

}  // namespace

std::vector<CurveRow> aggregate_curves(const std::vector<TrialRecord>& records,
                                       std::size_t truncation) {
  const std::map<std::string, int> name_index = build_name_index(records);

  std::map<CellKey, std::vector<const TrialRecord*>> cells;
  for (const TrialRecord& record : records) {
    cells[{record.dataset_id, record.method_id, record.p_index}].push_back(&record);
  }

  std::vector<CurveRow> rows;
  for (auto& [key, cell_records] : cells) {
    std::sort(cell_records.begin(), cell_records.end(),
              [](const TrialRecord* a, const TrialRecord* b) {
                return a->replicate < b->replicate;
              });
    std::size_t n_error = 0;
    std::vector<const TrialRecord*> ok_global;
    std::vector<const TrialRecord*> ok_local;
    double proportion = 0.0;
    for (const TrialRecord* record : cell_records) {
      proportion = record->proportion;
      if (!record->error.empty()) {
        ++n_error;
        continue;
      }
      if (record->global_ranks) ok_global.push_back(record);
      if (record->local_ranks) ok_local.push_back(record);
    }

    const auto emit = [&](Scope scope, const ScopeMetrics& metrics) {
      CurveRow row;
      row.dataset_id = key.dataset_id;
      row.method_id = key.method_id;
      row.scope = scope;
      row.p_index = key.p_index;
      row.proportion = proportion;
      row.n_ok = metrics.n_ok;
      row.n_error = n_error;
      row.mean_f1 = metrics.mean_f1;
      row.f1_interval = metrics.f1_interval;
      row.stability_value = metrics.stability_value;
      row.stability_interval = metrics.stability_interval;
      row.p_mode_value = metrics.p_mode_value;
      rows.push_back(row);
    };

    if (!ok_global.empty()) {
      emit(Scope::Global, global_scope_metrics(ok_global, name_index, truncation));
    }
    if (!ok_local.empty()) {
      emit(Scope::Local, local_scope_metrics(ok_local, name_index, truncation));
    }
  }
  return rows;
}

namespace {

struct GroupKey {
  std::string method_id;
  Scope scope;

  bool operator<(const GroupKey& other) const {
    if (method_id != other.method_id) return method_id < other.method_id;
    return static_cast<int>(scope) < static_cast<int>(other.scope);
  }
};

}  // namespace

std::vector<BucketSummary> aggregate_buckets(const std::vector<CurveRow>& curves) {
  std::map<GroupKey, std::array<std::vector<const CurveRow*>, 3>> groups;
  for (const CurveRow& row : curves) {
    auto& buckets = groups[{row.method_id, row.scope}];
    const auto bucket = bucketize(row.mean_f1);
    if (!bucket) continue;  // below every bucket: dropped
    buckets[static_cast<std::size_t>(bucket->label)].push_back(&row);
  }

  std::vector<BucketSummary> summaries;
  for (const auto& [key, buckets] : groups) {
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      BucketSummary summary;
      summary.method_id = key.method_id;
      summary.scope = key.scope;
      summary.bucket = static_cast<BucketLabel>(b);
      summary.cell_count = buckets[b].size();
      if (buckets[b].empty()) {
        summary.mean_stability = kNaN;
        summary.mean_p_mode = kNaN;
        summary.stability_interval = degenerate_interval(kNaN);
        summary.p_mode_interval = degenerate_interval(kNaN);
      } else {
        std::vector<double> stability_values;
        std::vector<double> p_mode_values;
        for (const CurveRow* row : buckets[b]) {
          stability_values.push_back(row->stability_value);
          p_mode_values.push_back(row->p_mode_value);
        }
        summary.stability_interval = interval_or_degenerate(stability_values);
        summary.p_mode_interval = interval_or_degenerate(p_mode_values);
        summary.mean_stability = summary.stability_interval.center;
        summary.mean_p_mode = summary.p_mode_interval.center;
      }
      summaries.push_back(std::move(summary));
    }
  }
  return summaries;
}

std::vector<BucketSummary> aggregate_buckets(const std::vector<TrialRecord>& records,
                                             std::size_t truncation) {
  return aggregate_buckets(aggregate_curves(records, truncation));
}

std::vector<StabilityHistogram> histogram_data(const std::vector<CurveRow>& curves,
                                               std::size_t bins) {
  if (bins < 2) {
    raise(ErrorCode::ConfigInvalid, "histograms need at least 2 bins");
  }
  std::map<GroupKey, std::array<std::vector<double>, 3>> groups;
  for (const CurveRow& row : curves) {
    const auto bucket = bucketize(row.mean_f1);
    if (!bucket) continue;
    groups[{row.method_id, row.scope}][static_cast<std::size_t>(bucket->label)].push_back(
        row.stability_value);
  }

  std::vector<StabilityHistogram> histograms;
  for (const auto& [key, buckets] : groups) {
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      if (buckets[b].empty()) continue;
      StabilityHistogram histogram;
      histogram.method_id = key.method_id;
      histogram.scope = key.scope;
      histogram.bucket = static_cast<BucketLabel>(b);
      histogram.cell_count = buckets[b].size();
      histogram.mass.assign(bins, 0.0);
      for (double value : buckets[b]) {
        const double clamped = std::clamp(value, 0.0, 1.0);
        auto bin = static_cast<std::size_t>(clamped * static_cast<double>(bins));
        bin = std::min(bin, bins - 1);  // stability 1.0 lands in the last bin
        histogram.mass[bin] += 1.0;
      }
      for (double& mass : histogram.mass) {
        mass /= static_cast<double>(buckets[b].size());
      }
      histograms.push_back(std::move(histogram));
    }
  }
  return histograms;
}

std::vector<StabilityHistogram> histogram_data(const std::vector<TrialRecord>& records,
                                               std::size_t bins, std::size_t truncation) {
  return histogram_data(aggregate_curves(records, truncation), bins);
}

}  // namespace rankstab
