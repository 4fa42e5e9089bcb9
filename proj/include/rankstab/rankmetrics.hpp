#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace rankstab {

/// Feature indices ordered most-important first.
using RankVector = std::vector<int>;

struct StabilityScore {
  double value = 0.0;          // in [0,1]; 1 iff all pairwise distances are 0
  std::size_t n_rankings = 0;
  std::size_t truncation = 0;
  std::size_t pair_count = 0;  // C(n_rankings, 2)
};

struct TruenessScore {
  double p_mode = 0.0;               // in (0,1]
  std::array<int, 3> modal_top3{};   // ordered top-3 tuple of the mode
  std::size_t n_rankings = 0;
};

enum class BucketLabel { Low, Medium, High };

struct AccuracyBucket {
  BucketLabel label;
  double lower;  // inclusive
  double upper;  // exclusive, except the high bucket which closes at 1.0
};

struct PerturbationInterval {
  double center = 0.0;  // arithmetic mean
  double lower = 0.0;
  double upper = 0.0;
  double lower_percentile = 10.0;
  double upper_percentile = 90.0;
};

const char* bucket_name(BucketLabel label);

/// Plain Kendall-Tau distance: discordant pairs / C(n,2). Inputs must be
/// permutations of the same index set.
double kendall_tau(const RankVector& r1, const RankVector& r2);

enum class PairWeighting {
  ReciprocalMinPosition,  // w(a,b) = 1 / min position of a or b in either ranking
  Uniform,                // w = 1; with truncation >= n this reduces to kendall_tau
};

/// Weighted Kendall-Tau distance over rankings truncated to the top
/// `truncation` entries. Elements missing from a truncated ranking sit at a
/// shared tied position truncation+1; a pair tied in exactly one ranking and
/// ordered in the other counts as half-discordant. The distance is normalized
/// by the all-discordant weighted ceiling, so it lies in [0,1] and is
/// symmetric. Disjoint top-K lists are legal and score high.
double wkt_distance(const RankVector& r1, const RankVector& r2, std::size_t truncation = 10,
                    PairWeighting weighting = PairWeighting::ReciprocalMinPosition);

/// 1 - mean pairwise wkt_distance over all C(N,2) ranking pairs.
StabilityScore stability(const std::vector<RankVector>& rankings, std::size_t truncation = 10);

/// Empirical frequency of the modal ordered top-3 tuple. Ties between equally
/// frequent tuples break toward the lexicographically smallest tuple.
TruenessScore p_mode(const std::vector<RankVector>& rankings);

/// F1 for class 1; defined as 0 when precision + recall is 0.
double f1_score(const std::vector<int>& predicted, const std::vector<int>& actual);

/// F1 discretization: low [0.5,0.65), medium [0.65,0.8), high [0.8,1.0].
/// Below 0.5 is unbucketed.
std::optional<AccuracyBucket> bucketize(double f1);

/// Mean plus linear-interpolated percentile bounds.
PerturbationInterval perturbation_interval(const std::vector<double>& values,
                                           double lower_percentile = 10.0,
                                           double upper_percentile = 90.0);

/// Linear-interpolated percentile of a sorted sample (exposed for reuse by
/// aggregation code; `sorted` must be ascending and non-empty).
double percentile_sorted(const std::vector<double>& sorted, double percentile);

}  // namespace rankstab
