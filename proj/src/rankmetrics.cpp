#include "rankstab/rankmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "rankstab/error.hpp"

namespace rankstab {

namespace {

int order_cmp(std::size_t a, std::size_t b) {
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

}  // namespace

const char* bucket_name(BucketLabel label) {
  switch (label) {
    case BucketLabel::Low: return "low";
    case BucketLabel::Medium: return "medium";
    case BucketLabel::High: return "high";
  }
  return "?";
}

double kendall_tau(const RankVector& r1, const RankVector& r2) {
  RankVector s1 = r1;
  RankVector s2 = r2;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  if (s1 != s2 || std::adjacent_find(s1.begin(), s1.end()) != s1.end()) {
    raise(ErrorCode::MismatchedElements,
          "rank vectors must be permutations of the same index set");
  }
  const std::size_t n = r1.size();
  if (n < 2) return 0.0;

  // Position of each element in r2.
  std::map<int, std::size_t> pos2;
  for (std::size_t i = 0; i < n; ++i) pos2[r2[i]] = i;

  std::size_t discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pos2.at(r1[i]) > pos2.at(r1[j])) ++discordant;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(discordant) / pairs;
}

double wkt_distance(const RankVector& r1, const RankVector& r2, std::size_t truncation,
                    PairWeighting weighting) {
  if (truncation < 1) {
    raise(ErrorCode::ConfigInvalid, "truncation must be >= 1");
  }
  const std::size_t k1 = std::min(truncation, r1.size());
  const std::size_t k2 = std::min(truncation, r2.size());
  const std::size_t absent = truncation + 1;  // shared tied position for missing elements

  // 1-based position of every element of the union in each truncated ranking.
  std::map<int, std::pair<std::size_t, std::size_t>> positions;
  for (std::size_t i = 0; i < k1; ++i) positions[r1[i]] = {i + 1, absent};
  for (std::size_t i = 0; i < k2; ++i) {
    auto [it, inserted] = positions.try_emplace(r2[i], absent, i + 1);
    if (!inserted) it->second.second = i + 1;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pos;
  pos.reserve(positions.size());
  for (const auto& [element, p] : positions) pos.push_back(p);
  if (pos.size() < 2) return 0.0;

  double weighted_discordance = 0.0;
  double ceiling = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const int c1 = order_cmp(pos[i].first, pos[j].first);
      const int c2 = order_cmp(pos[i].second, pos[j].second);
      double disc = 0.0;
      if (c1 != 0 && c2 != 0) {
        disc = (c1 != c2) ? 1.0 : 0.0;
      } else if (c1 != c2) {  // tied in exactly one ranking, ordered in the other
        disc = 0.5;
      }
      double weight = 1.0;
      if (weighting == PairWeighting::ReciprocalMinPosition) {
        const std::size_t best = std::min(std::min(pos[i].first, pos[j].first),
                                          std::min(pos[i].second, pos[j].second));
        weight = 1.0 / static_cast<double>(best);
      }
      weighted_discordance += disc * weight;
      ceiling += weight;
    }
  }
  return weighted_discordance / ceiling;
}

StabilityScore stability(const std::vector<RankVector>& rankings, std::size_t truncation) {
  if (rankings.size() < 2) {
    raise(ErrorCode::TooFewRankings,
          "stability needs at least 2 rankings, got " + std::to_string(rankings.size()));
  }
  const std::size_t n = rankings.size();
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += wkt_distance(rankings[i], rankings[j], truncation);
      ++pairs;
    }
  }
  StabilityScore score;
  score.value = 1.0 - total / static_cast<double>(pairs);
  score.n_rankings = n;
  score.truncation = truncation;
  score.pair_count = pairs;
  return score;
}

TruenessScore p_mode(const std::vector<RankVector>& rankings) {
  if (rankings.empty()) {
    raise(ErrorCode::TooFewRankings, "p_mode needs at least 1 ranking");
  }
  std::map<std::array<int, 3>, std::size_t> counts;
  for (const auto& r : rankings) {
    if (r.size() < 3) {
      raise(ErrorCode::RankTooShort,
            "p_mode needs rankings with at least 3 entries, got " + std::to_string(r.size()));
    }
    counts[{r[0], r[1], r[2]}] += 1;
  }
  // Map iteration is lexicographic, so the first strict maximum is the
  // smallest tuple among ties.
  std::array<int, 3> mode{};
  std::size_t best = 0;
  for (const auto& [tuple, count] : counts) {
    if (count > best) {
      best = count;
      mode = tuple;
    }
  }
  TruenessScore score;
  score.p_mode = static_cast<double>(best) / static_cast<double>(rankings.size());
  score.modal_top3 = mode;
  score.n_rankings = rankings.size();
  return score;
}

double f1_score(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size()) {
    raise(ErrorCode::LengthMismatch, "predicted length " + std::to_string(predicted.size()) +
                                         " != actual length " + std::to_string(actual.size()));
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int a = actual[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1)) {
      raise(ErrorCode::ParseError, "labels must be 0 or 1");
    }
    if (p == 1 && a == 1) ++tp;
    if (p == 1 && a == 0) ++fp;
    if (p == 0 && a == 1) ++fn;
  }
  const double denominator = static_cast<double>(2 * tp + fp + fn);
  if (denominator == 0.0) return 0.0;
  return 2.0 * static_cast<double>(tp) / denominator;
}

std::optional<AccuracyBucket> bucketize(double f1) {
  if (f1 < 0.5) return std::nullopt;
  if (f1 < 0.65) return AccuracyBucket{BucketLabel::Low, 0.5, 0.65};
  if (f1 < 0.8) return AccuracyBucket{BucketLabel::Medium, 0.65, 0.8};
  return AccuracyBucket{BucketLabel::High, 0.8, 1.0};
}

double percentile_sorted(const std::vector<double>& sorted, double percentile) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double rank = percentile / 100.0 * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

PerturbationInterval perturbation_interval(const std::vector<double>& values,
                                           double lower_percentile, double upper_percentile) {
  if (values.size() < 2) {
    raise(ErrorCode::TooFewValues, "perturbation_interval needs at least 2 values");
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : values) sum += v;

  PerturbationInterval interval;
  interval.center = sum / static_cast<double>(values.size());
  interval.lower = percentile_sorted(sorted, lower_percentile);
  interval.upper = percentile_sorted(sorted, upper_percentile);
  interval.lower_percentile = lower_percentile;
  interval.upper_percentile = upper_percentile;
  return interval;
}

}  // namespace rankstab
