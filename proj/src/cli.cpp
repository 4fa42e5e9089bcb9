#include "rankstab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rankstab/aggregate.hpp"
#include "rankstab/config_file.hpp"
#include "rankstab/dataset.hpp"
#include "rankstab/error.hpp"
#include "rankstab/records_io.hpp"
#include "rankstab/version.hpp"

namespace rankstab {

namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::MissingColumn:
      return 2;
    case ErrorCode::ParseError:
    case ErrorCode::SingleClassDataset:
    case ErrorCode::EmptyDataset:
    case ErrorCode::CannotStratify:
    case ErrorCode::NonFinite:
    case ErrorCode::WidthMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::DatasetLoad:
      return 3;
    case ErrorCode::SchemaVersionUnsupported:
    case ErrorCode::CorruptRecord:
    case ErrorCode::NoRecords:
      return 4;
    default:
      return 1;
  }
}

int cmd_validate(const std::string& path, const std::string& label_column) {
  const Dataset dataset = load_csv(path, label_column);
  std::size_t positives = 0;
  for (int y : dataset.labels) positives += static_cast<std::size_t>(y);
  const std::size_t negatives = dataset.rows() - positives;

  std::cout << "dataset: " << path << "\n";
  std::cout << "instances: " << dataset.rows() << "\n";
  std::cout << "features: " << dataset.cols() << "\n";
  std::cout << "class balance: " << negatives << " zeros ("
            << format_double(100.0 * static_cast<double>(negatives) /
                             static_cast<double>(dataset.rows()))
            << "%), " << positives << " ones ("
            << format_double(100.0 * static_cast<double>(positives) /
                             static_cast<double>(dataset.rows()))
            << "%)\n";

  std::vector<std::string> constant_columns;
  for (Eigen::Index j = 0; j < dataset.features.cols(); ++j) {
    const double first = dataset.features(0, j);
    if ((dataset.features.col(j).array() == first).all()) {
      constant_columns.push_back(dataset.feature_names[static_cast<std::size_t>(j)]);
    }
  }
  if (constant_columns.empty()) {
    std::cout << "constant columns: none\n";
  } else {
    std::cout << "constant columns (warning):";
    for (const std::string& name : constant_columns) std::cout << ' ' << name;
    std::cout << "\n";
  }
  std::cout << "ok\n";
  return 0;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y%m%d-%H%M%S", &tm);
  return buffer;
}

fs::path resolve_run_dir(const std::string& out_override, const std::string& config_root,
                         const std::string& dataset_id) {
  if (!out_override.empty()) {
    const fs::path dir(out_override);
    if (fs::exists(dir / "records.jsonl")) {
      raise(ErrorCode::ConfigInvalid,
            "output directory '" + out_override + "' already holds a run; refusing to overwrite");
    }
    return dir;
  }
  fs::path root;
  if (!config_root.empty()) {
    root = config_root;
  } else if (const char* env_root = std::getenv("RANKSTAB_OUT")) {
    root = env_root;
  } else {
    root = "rankstab-runs";
  }
  const std::string stamp = timestamp_now();
  fs::path dir = root / (stamp + "-" + dataset_id);
  for (int suffix = 2; fs::exists(dir); ++suffix) {
    dir = root / (stamp + "-" + dataset_id + "-" + std::to_string(suffix));
  }
  return dir;
}

std::string timings_csv(const std::vector<TrialRecord>& records) {
  std::string out = "method,p_index,replicate,wall_time_ms\n";
  for (const TrialRecord& record : records) {
    out += record.method_id;
    out += ',';
    out += std::to_string(record.p_index);
    out += ',';
    out += std::to_string(record.replicate);
    out += ',';
    out += format_double(record.wall_time_ms);
    out += '\n';
  }
  return out;
}

struct RunOverrides {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t replicates = 0;
  bool replicates_set = false;
  std::string proportions;
  std::size_t jobs = 0;
  bool jobs_set = false;
  std::string out_dir;
};

int cmd_run(const std::string& config_path, const RunOverrides& overrides) {
  RunConfig run_config = load_run_config(config_path);
  ExperimentConfig& config = run_config.experiment;
  if (overrides.seed_set) config.master_seed = overrides.seed;
  if (overrides.replicates_set) config.replicates = overrides.replicates;
  if (!overrides.proportions.empty()) {
    config.proportions = parse_proportions(overrides.proportions);
  }
  if (overrides.jobs_set) config.jobs = overrides.jobs;
  validate_config(config);

  // Resolved values only from here on, so the manifest alone reproduces the run.
  config.dataset_path = fs::absolute(config.dataset_path).string();
  if (config.dataset_id.empty()) {
    config.dataset_id = fs::path(config.dataset_path).stem().string();
  }

  const fs::path run_dir =
      resolve_run_dir(overrides.out_dir, run_config.output_dir, config.dataset_id);
  fs::create_directories(run_dir);

  const ExperimentResult result = run_experiment(config);
  const std::vector<CurveRow> curves = aggregate_curves(result.records);
  const std::vector<BucketSummary> buckets = aggregate_buckets(curves);
  const std::vector<StabilityHistogram> histograms = histogram_data(curves);

  write_records_jsonl((run_dir / "records.jsonl").string(), result.records);
  write_text_file((run_dir / "curves.csv").string(), curves_to_csv(curves));
  write_text_file((run_dir / "buckets.csv").string(), buckets_to_csv(buckets));
  write_text_file((run_dir / "histograms.csv").string(), histograms_to_csv(histograms));
  write_text_file((run_dir / "timings.csv").string(), timings_csv(result.records));

  const std::string root_for_manifest =
      !run_config.output_dir.empty()
          ? run_config.output_dir
          : fs::absolute(run_dir).parent_path().string();
  write_text_file((run_dir / "manifest.ini").string(), manifest_text(config, root_for_manifest));

  std::cout << "run directory: " << run_dir.string() << "\n";
  std::cout << "records: " << result.records.size() << "\n";
  if (result.error_count > 0) {
    std::cout << "warning: " << result.error_count
              << " trial(s) failed and were excluded from aggregation\n";
  }
  return 0;
}

int cmd_metrics(const std::string& records_path, const std::string& out_dir) {
  const std::vector<TrialRecord> records = read_records_jsonl(records_path);
  const std::vector<CurveRow> curves = aggregate_curves(records);
  const std::vector<BucketSummary> buckets = aggregate_buckets(curves);
  const std::vector<StabilityHistogram> histograms = histogram_data(curves);

  const fs::path dir = out_dir.empty() ? fs::path(records_path).parent_path() : fs::path(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  write_text_file((dir / "curves.csv").string(), curves_to_csv(curves));
  write_text_file((dir / "buckets.csv").string(), buckets_to_csv(buckets));
  write_text_file((dir / "histograms.csv").string(), histograms_to_csv(histograms));
  std::cout << "wrote " << (dir / "curves.csv").string() << ", " << (dir / "buckets.csv").string()
            << ", " << (dir / "histograms.csv").string() << "\n";
  return 0;
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::cout << row[c];
      if (c + 1 < row.size()) {
        std::cout << std::string(widths[c] - row[c].size() + 2, ' ');
      }
    }
    std::cout << "\n";
  }
}

std::string fixed3(double value) {
  if (std::isnan(value)) return "-";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

int cmd_report(const std::string& records_path) {
  const std::vector<TrialRecord> records = read_records_jsonl(records_path);
  const std::vector<CurveRow> curves = aggregate_curves(records);
  const std::vector<BucketSummary> buckets = aggregate_buckets(curves);

  std::cout << "== accuracy curves (per method, scope, proportion) ==\n";
  std::vector<std::vector<std::string>> curve_rows;
  curve_rows.push_back({"dataset", "method", "scope", "p", "mean_f1", "stability", "p_mode"});
  for (const CurveRow& row : curves) {
    curve_rows.push_back({row.dataset_id, row.method_id,
                          row.scope == Scope::Global ? "global" : "local",
                          format_double(row.proportion), fixed3(row.mean_f1),
                          fixed3(row.stability_value), fixed3(row.p_mode_value)});
  }
  print_table(curve_rows);

  std::cout << "\n== accuracy buckets (per method, scope) ==\n";
  std::vector<std::vector<std::string>> bucket_rows;
  bucket_rows.push_back(
      {"method", "scope", "bucket", "cells", "mean_stability", "mean_p_mode"});
  for (const BucketSummary& summary : buckets) {
    bucket_rows.push_back({summary.method_id,
                           summary.scope == Scope::Global ? "global" : "local",
                           bucket_name(summary.bucket), std::to_string(summary.cell_count),
                           fixed3(summary.mean_stability), fixed3(summary.mean_p_mode)});
  }
  print_table(bucket_rows);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"accuracy-vs-interpretation-stability experiment runner"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check a dataset CSV and print a summary");
  std::string validate_path;
  std::string validate_label;
  validate->add_option("csv", validate_path, "dataset CSV path")->required();
  validate->add_option("label_column", validate_label, "label column name")->required();

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string run_config_path;
  RunOverrides overrides;
  run->add_option("--config", run_config_path, "config or manifest file")->required();
  auto* seed_opt = run->add_option("--seed", overrides.seed, "override master seed");
  auto* n_opt = run->add_option("--n", overrides.replicates, "override replicate count");
  run->add_option("--proportions", overrides.proportions,
                  "override proportion grid (list or start:stop:step)");
  auto* jobs_opt = run->add_option("--jobs", overrides.jobs, "worker thread cap (0 = hardware)");
  run->add_option("--out", overrides.out_dir, "exact output directory (default: timestamped)");

  auto* metrics = app.add_subcommand("metrics", "recompute CSV outputs from records.jsonl");
  std::string metrics_records;
  std::string metrics_out;
  metrics->add_option("records", metrics_records, "records.jsonl path")->required();
  metrics->add_option("--out", metrics_out, "output directory (default: records directory)");

  auto* report = app.add_subcommand("report", "print summary tables from records.jsonl");
  std::string report_records;
  report->add_option("records", report_records, "records.jsonl path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_path, validate_label);
    if (run->parsed()) {
      overrides.seed_set = seed_opt->count() > 0;
      overrides.replicates_set = n_opt->count() > 0;
      overrides.jobs_set = jobs_opt->count() > 0;
      return cmd_run(run_config_path, overrides);
    }
    if (metrics->parsed()) return cmd_metrics(metrics_records, metrics_out);
    if (report->parsed()) return cmd_report(report_records);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rankstab
