#include "rankstab/records_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rankstab/error.hpp"

namespace rankstab {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

namespace {

json record_to_json(const TrialRecord& record) {
  json j;
  j["schema_version"] = kRecordsSchemaVersion;
  j["dataset_id"] = record.dataset_id;
  j["method"] = record.method_id;
  j["proportion"] = record.proportion;
  j["p_index"] = record.p_index;
  j["replicate"] = record.replicate;
  j["seed"] = record.seed;
  if (record.error.empty()) {
    j["error"] = nullptr;
    j["f1"] = record.f1;
  } else {
    j["error"] = record.error;
    j["f1"] = nullptr;
  }
  j["global_ranks"] = record.global_ranks ? json(*record.global_ranks) : json(nullptr);
  j["local_ranks"] = record.local_ranks ? json(*record.local_ranks) : json(nullptr);
  return j;
}

TrialRecord record_from_json(const json& j, std::size_t line) {
  const auto corrupt = [line](const std::string& what) -> Error {
    return Error(ErrorCode::CorruptRecord,
                 "line " + std::to_string(line) + ": " + what);
  };
  if (!j.is_object()) throw corrupt("not a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw corrupt("missing schema_version");
  }
  const int version = j["schema_version"].get<int>();
  if (version != kRecordsSchemaVersion) {
    raise(ErrorCode::SchemaVersionUnsupported,
          "records use schema version " + std::to_string(version) + ", supported version is " +
              std::to_string(kRecordsSchemaVersion));
  }
  try {
    TrialRecord record;
    record.dataset_id = j.at("dataset_id").get<std::string>();
    record.method_id = j.at("method").get<std::string>();
    record.proportion = j.at("proportion").get<double>();
    record.p_index = j.at("p_index").get<std::size_t>();
    record.replicate = j.at("replicate").get<std::size_t>();
    record.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("error").is_null()) {
      record.error = j.at("error").get<std::string>();
    }
    if (!j.at("f1").is_null()) {
      record.f1 = j.at("f1").get<double>();
    }
    if (!j.at("global_ranks").is_null()) {
      record.global_ranks = j.at("global_ranks").get<std::vector<std::string>>();
    }
    if (!j.at("local_ranks").is_null()) {
      record.local_ranks = j.at("local_ranks").get<std::vector<std::vector<std::string>>>();
    }
    return record;
  } catch (const json::exception& e) {
    throw corrupt(e.what());
  }
}

}  // namespace

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const TrialRecord& record : records) {
    out += record_to_json(record).dump();
    out += '\n';
  }
  return out;
}

void write_records_jsonl(const std::string& path, const std::vector<TrialRecord>& records) {
  write_text_file(path, records_to_jsonl(records));
}

std::vector<TrialRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::DatasetLoad, "cannot open records file '" + path + "'");
  }
  std::vector<TrialRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      raise(ErrorCode::CorruptRecord,
            "line " + std::to_string(line_number) + ": invalid JSON");
    }
    records.push_back(record_from_json(j, line_number));
  }
  if (records.empty()) {
    raise(ErrorCode::NoRecords, "records file '" + path + "' contains no records");
  }
  return records;
}

namespace {

const char* scope_name(Scope scope) { return scope == Scope::Global ? "global" : "local"; }

void append_interval(std::string& out, const PerturbationInterval& interval) {
  out += ',';
  out += format_double(interval.lower);
  out += ',';
  out += format_double(interval.upper);
}

}  // namespace

std::string curves_to_csv(const std::vector<CurveRow>& rows) {
  std::string out =
      "dataset_id,method,scope,p_index,proportion,n_ok,n_error,"
      "mean_f1,f1_lower,f1_upper,"
      "stability,stability_lower,stability_upper,p_mode\n";
  for (const CurveRow& row : rows) {
    out += row.dataset_id;
    out += ',';
    out += row.method_id;
    out += ',';
    out += scope_name(row.scope);
    out += ',';
    out += std::to_string(row.p_index);
    out += ',';
    out += format_double(row.proportion);
    out += ',';
    out += std::to_string(row.n_ok);
    out += ',';
    out += std::to_string(row.n_error);
    out += ',';
    out += format_double(row.mean_f1);
    append_interval(out, row.f1_interval);
    out += ',';
    out += format_double(row.stability_value);
    append_interval(out, row.stability_interval);
    out += ',';
    out += format_double(row.p_mode_value);
    out += '\n';
  }
  return out;
}

std::string buckets_to_csv(const std::vector<BucketSummary>& summaries) {
  std::string out =
      "method,scope,bucket,cell_count,"
      "mean_stability,stability_lower,stability_upper,"
      "mean_p_mode,p_mode_lower,p_mode_upper\n";
  for (const BucketSummary& summary : summaries) {
    out += summary.method_id;
    out += ',';
    out += scope_name(summary.scope);
    out += ',';
    out += bucket_name(summary.bucket);
    out += ',';
    out += std::to_string(summary.cell_count);
    out += ',';
    out += format_double(summary.mean_stability);
    append_interval(out, summary.stability_interval);
    out += ',';
    out += format_double(summary.mean_p_mode);
    append_interval(out, summary.p_mode_interval);
    out += '\n';
  }
  return out;
}

std::string histograms_to_csv(const std::vector<StabilityHistogram>& histograms) {
  std::string out = "method,scope,bucket,cell_count,bin_index,bin_lower,bin_upper,mass\n";
  for (const StabilityHistogram& histogram : histograms) {
    const auto bins = histogram.mass.size();
    for (std::size_t bin = 0; bin < bins; ++bin) {
      out += histogram.method_id;
      out += ',';
      out += scope_name(histogram.scope);
      out += ',';
      out += bucket_name(histogram.bucket);
      out += ',';
      out += std::to_string(histogram.cell_count);
      out += ',';
      out += std::to_string(bin);
      out += ',';
      out += format_double(static_cast<double>(bin) / static_cast<double>(bins));
      out += ',';
      out += format_double(static_cast<double>(bin + 1) / static_cast<double>(bins));
      out += ',';
      out += format_double(histogram.mass[bin]);
      out += '\n';
    }
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(ErrorCode::DatasetLoad, "cannot write file '" + path + "'");
  }
  out << content;
  if (!out) {
    raise(ErrorCode::DatasetLoad, "failed writing file '" + path + "'");
  }
}

}  // namespace rankstab
