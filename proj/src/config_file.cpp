#include "rankstab/config_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rankstab/error.hpp"
#include "rankstab/records_io.hpp"
#include "rankstab/version.hpp"

namespace rankstab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& value, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    raise(ErrorCode::ConfigInvalid, "key '" + key + "': expected a real number, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_uint64(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    raise(ErrorCode::ConfigInvalid,
          "key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

int to_int(const std::string& value, const std::string& key) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    raise(ErrorCode::ConfigInvalid, "key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string trimmed = trim(item);
    if (!trimmed.empty()) items.push_back(trimmed);
  }
  return items;
}

}  // namespace

IniSections parse_ini(const std::string& text) {
  IniSections sections;
  std::stringstream stream(text);
  std::string line;
  std::string current;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        raise(ErrorCode::ConfigInvalid,
              "line " + std::to_string(line_number) + ": malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos || current.empty()) {
      raise(ErrorCode::ConfigInvalid,
            "line " + std::to_string(line_number) + ": expected 'key = value' inside a section");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) {
      raise(ErrorCode::ConfigInvalid, "line " + std::to_string(line_number) + ": empty key");
    }
    sections[current][key] = value;
  }
  return sections;
}

std::vector<double> parse_proportions(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) {
      raise(ErrorCode::ConfigInvalid, "proportion range must be start:stop:step");
    }
    const double start = to_double(trim(text.substr(0, first)), "proportions");
    const double stop = to_double(trim(text.substr(first + 1, second - first - 1)), "proportions");
    const double step = to_double(trim(text.substr(second + 1)), "proportions");
    if (step <= 0.0 || stop < start) {
      raise(ErrorCode::ConfigInvalid, "proportion range must be increasing with step > 0");
    }
    for (std::size_t k = 0;; ++k) {
      // Snap to 12 decimals so grid points print as written (0.3, not 0.30000...04).
      const double p = std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12;
      if (p > stop + 1e-9) break;
      grid.push_back(std::min(p, 1.0));
    }
  } else {
    for (const std::string& item : split_list(text)) {
      grid.push_back(to_double(item, "proportions"));
    }
  }
  if (grid.empty()) {
    raise(ErrorCode::ConfigInvalid, "proportion grid is empty");
  }
  return grid;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"dataset", {"path", "label_column", "id"}},
      {"experiment",
       {"proportions", "replicates", "probe_count", "master_seed", "train_fraction", "methods",
        "jobs"}},
      {"models",
       {"logistic_l2", "logistic_max_iterations", "logistic_tolerance", "forest_trees",
        "forest_feature_subset", "forest_max_depth", "forest_min_samples_split", "boosted_rounds",
        "boosted_learning_rate", "boosted_max_depth", "boosted_min_samples_split",
        "additive_cycles", "additive_bins", "additive_learning_rate"}},
      {"explain",
       {"shap_exact_max_features", "shap_permutations", "shap_background_rows",
        "shap_global_instances", "lime_samples", "lime_kernel_width", "lime_ridge"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const IniSections sections = parse_ini(buffer.str());

  for (const auto& [section, values] : sections) {
    if (section == "provenance") continue;
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      raise(ErrorCode::ConfigInvalid, "unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : values) {
      if (known->second.count(key) == 0) {
        raise(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }

  const auto get = [&](const std::string& section, const std::string& key) -> const std::string* {
    const auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };

  RunConfig config;
  ExperimentConfig& experiment = config.experiment;

  if (const auto* v = get("dataset", "path")) experiment.dataset_path = *v;
  if (const auto* v = get("dataset", "label_column")) experiment.label_column = *v;
  if (const auto* v = get("dataset", "id")) experiment.dataset_id = *v;

  if (const auto* v = get("experiment", "proportions")) {
    experiment.proportions = parse_proportions(*v);
  }
  if (const auto* v = get("experiment", "replicates")) {
    experiment.replicates = to_uint64(*v, "replicates");
  }
  if (const auto* v = get("experiment", "probe_count")) {
    experiment.probe_count = to_uint64(*v, "probe_count");
  }
  if (const auto* v = get("experiment", "master_seed")) {
    experiment.master_seed = to_uint64(*v, "master_seed");
  }
  if (const auto* v = get("experiment", "train_fraction")) {
    experiment.train_fraction = to_double(*v, "train_fraction");
  }
  if (const auto* v = get("experiment", "jobs")) {
    experiment.jobs = to_uint64(*v, "jobs");
  }
  if (const auto* v = get("experiment", "methods")) {
    if (*v == "all") {
      experiment.methods.clear();
    } else {
      experiment.methods = split_list(*v);
    }
  }

  ModelParams& models = experiment.models;
  if (const auto* v = get("models", "logistic_l2")) models.logistic.l2 = to_double(*v, "logistic_l2");
  if (const auto* v = get("models", "logistic_max_iterations")) {
    models.logistic.max_iterations = to_int(*v, "logistic_max_iterations");
  }
  if (const auto* v = get("models", "logistic_tolerance")) {
    models.logistic.tolerance = to_double(*v, "logistic_tolerance");
  }
  if (const auto* v = get("models", "forest_trees")) models.forest.n_trees = to_int(*v, "forest_trees");
  if (const auto* v = get("models", "forest_feature_subset")) {
    models.forest.feature_subset = to_int(*v, "forest_feature_subset");
  }
  if (const auto* v = get("models", "forest_max_depth")) {
    models.forest.tree.max_depth = to_int(*v, "forest_max_depth");
  }
  if (const auto* v = get("models", "forest_min_samples_split")) {
    models.forest.tree.min_samples_split = to_int(*v, "forest_min_samples_split");
  }
  if (const auto* v = get("models", "boosted_rounds")) {
    models.boosted.rounds = to_int(*v, "boosted_rounds");
  }
  if (const auto* v = get("models", "boosted_learning_rate")) {
    models.boosted.learning_rate = to_double(*v, "boosted_learning_rate");
  }
  if (const auto* v = get("models", "boosted_max_depth")) {
    models.boosted.max_depth = to_int(*v, "boosted_max_depth");
  }
  if (const auto* v = get("models", "boosted_min_samples_split")) {
    models.boosted.min_samples_split = to_int(*v, "boosted_min_samples_split");
  }
  if (const auto* v = get("models", "additive_cycles")) {
    models.additive.cycles = to_int(*v, "additive_cycles");
  }
  if (const auto* v = get("models", "additive_bins")) {
    models.additive.bins = to_int(*v, "additive_bins");
  }
  if (const auto* v = get("models", "additive_learning_rate")) {
    models.additive.learning_rate = to_double(*v, "additive_learning_rate");
  }

  ExplainParams& explain = experiment.explain;
  if (const auto* v = get("explain", "shap_exact_max_features")) {
    explain.shap_exact_max_features = to_uint64(*v, "shap_exact_max_features");
  }
  if (const auto* v = get("explain", "shap_permutations")) {
    explain.shap_permutations = to_uint64(*v, "shap_permutations");
  }
  if (const auto* v = get("explain", "shap_background_rows")) {
    explain.shap_background_rows = to_uint64(*v, "shap_background_rows");
  }
  if (const auto* v = get("explain", "shap_global_instances")) {
    explain.shap_global_instances = to_uint64(*v, "shap_global_instances");
  }
  if (const auto* v = get("explain", "lime_samples")) {
    explain.lime_samples = to_uint64(*v, "lime_samples");
  }
  if (const auto* v = get("explain", "lime_kernel_width")) {
    explain.lime_kernel_width = to_double(*v, "lime_kernel_width");
  }
  if (const auto* v = get("explain", "lime_ridge")) {
    explain.lime_ridge = to_double(*v, "lime_ridge");
  }

  if (const auto* v = get("output", "dir")) config.output_dir = *v;

  validate_config(experiment);
  return config;
}

std::string manifest_text(const ExperimentConfig& config, const std::string& output_root) {
  std::string methods;
  if (config.methods.empty()) {
    methods = "all";
  } else {
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      if (i > 0) methods += ',';
      methods += config.methods[i];
    }
  }
  std::string proportions;
  for (std::size_t i = 0; i < config.proportions.size(); ++i) {
    if (i > 0) proportions += ',';
    proportions += format_double(config.proportions[i]);
  }

  std::string out;
  out += "# rankstab run manifest; loadable with `rankstab run --config <this file>`\n";
  out += "[dataset]\n";
  out += "path = " + config.dataset_path + "\n";
  out += "label_column = " + config.label_column + "\n";
  out += "id = " + config.dataset_id + "\n";
  out += "\n[experiment]\n";
  out += "proportions = " + proportions + "\n";
  out += "replicates = " + std::to_string(config.replicates) + "\n";
  out += "probe_count = " + std::to_string(config.probe_count) + "\n";
  out += "master_seed = " + std::to_string(config.master_seed) + "\n";
  out += "train_fraction = " + format_double(config.train_fraction) + "\n";
  out += "methods = " + methods + "\n";
  out += "jobs = " + std::to_string(config.jobs) + "\n";
  out += "\n[models]\n";
  out += "logistic_l2 = " + format_double(config.models.logistic.l2) + "\n";
  out += "logistic_max_iterations = " + std::to_string(config.models.logistic.max_iterations) + "\n";
  out += "logistic_tolerance = " + format_double(config.models.logistic.tolerance) + "\n";
  out += "forest_trees = " + std::to_string(config.models.forest.n_trees) + "\n";
  out += "forest_feature_subset = " + std::to_string(config.models.forest.feature_subset) + "\n";
  out += "forest_max_depth = " + std::to_string(config.models.forest.tree.max_depth) + "\n";
  out += "forest_min_samples_split = " +
         std::to_string(config.models.forest.tree.min_samples_split) + "\n";
  out += "boosted_rounds = " + std::to_string(config.models.boosted.rounds) + "\n";
  out += "boosted_learning_rate = " + format_double(config.models.boosted.learning_rate) + "\n";
  out += "boosted_max_depth = " + std::to_string(config.models.boosted.max_depth) + "\n";
  out += "boosted_min_samples_split = " +
         std::to_string(config.models.boosted.min_samples_split) + "\n";
  out += "additive_cycles = " + std::to_string(config.models.additive.cycles) + "\n";
  out += "additive_bins = " + std::to_string(config.models.additive.bins) + "\n";
  out += "additive_learning_rate = " + format_double(config.models.additive.learning_rate) + "\n";
  out += "\n[explain]\n";
  out += "shap_exact_max_features = " + std::to_string(config.explain.shap_exact_max_features) + "\n";
  out += "shap_permutations = " + std::to_string(config.explain.shap_permutations) + "\n";
  out += "shap_background_rows = " + std::to_string(config.explain.shap_background_rows) + "\n";
  out += "shap_global_instances = " + std::to_string(config.explain.shap_global_instances) + "\n";
  out += "lime_samples = " + std::to_string(config.explain.lime_samples) + "\n";
  out += "lime_kernel_width = " + format_double(config.explain.lime_kernel_width) + "\n";
  out += "lime_ridge = " + format_double(config.explain.lime_ridge) + "\n";
  out += "\n[output]\n";
  out += "dir = " + output_root + "\n";
  out += "\n[provenance]\n";
  out += std::string("tool_version = ") + kToolVersion + "\n";
  out += "records_schema_version = " + std::to_string(kRecordsSchemaVersion) + "\n";
  return out;
}

}  // namespace rankstab
