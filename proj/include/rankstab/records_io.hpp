#pragma once

#include <string>
#include <vector>

#include "rankstab/aggregate.hpp"
#include "rankstab/experiment.hpp"

namespace rankstab {

inline constexpr int kRecordsSchemaVersion = 1;

/// Shortest round-trip decimal form; the one float format used in every
/// serialized artifact so reruns are byte-comparable.
std::string format_double(double value);

std::string records_to_jsonl(const std::vector<TrialRecord>& records);
void write_records_jsonl(const std::string& path, const std::vector<TrialRecord>& records);

/// Parses a records file. Unknown schema versions raise
/// SchemaVersionUnsupported; malformed lines raise CorruptRecord with the
/// 1-based line number; an empty file raises NoRecords.
std::vector<TrialRecord> read_records_jsonl(const std::string& path);

std::string curves_to_csv(const std::vector<CurveRow>& rows);
std::string buckets_to_csv(const std::vector<BucketSummary>& summaries);
std::string histograms_to_csv(const std::vector<StabilityHistogram>& histograms);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rankstab
