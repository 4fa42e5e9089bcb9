#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankstab/dataset.hpp"
#include "rankstab/explain.hpp"
#include "rankstab/lime.hpp"
#include "rankstab/models.hpp"
#include "rankstab/shap.hpp"

namespace rankstab {

enum class ModelKind { Logistic, Forest, Boosted, Additive };
enum class ExplainerKind { Rcm, Mdi, Shap, Lime, SelfExplain };

/// One model + interpretation pairing with its rank scopes.
struct MethodSpec {
  std::string id;
  ModelKind model;
  ExplainerKind explainer;
  bool global_scope;
  bool local_scope;
};

const std::vector<MethodSpec>& method_catalog();
const MethodSpec* find_method(std::string_view id);

struct ModelParams {
  LogisticConfig logistic{};
  ForestConfig forest{};
  BoostedConfig boosted{};
  AdditiveConfig additive{};
};

struct ExplainParams {
  std::size_t shap_exact_max_features = 15;
  std::size_t shap_permutations = 500;
  std::size_t shap_background_rows = 100;  // background rows per explanation
  std::size_t shap_global_instances = 20;  // test rows aggregated for global SHAP
  std::size_t lime_samples = 1000;
  double lime_kernel_width = 0.0;  // 0 means 0.75 * sqrt(P)
  double lime_ridge = 1e-3;
};

struct ExperimentConfig {
  std::string dataset_path;
  std::string label_column;
  std::string dataset_id;  // defaults to the dataset file stem
  std::vector<double> proportions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t replicates = 200;
  std::size_t probe_count = 5;
  std::vector<std::string> methods;  // empty means the full catalog
  ModelParams models{};
  ExplainParams explain{};
  std::uint64_t master_seed = 0;
  double train_fraction = 0.7;
  std::size_t jobs = 1;
};

/// Throws ConfigInvalid on bad grids, counts, or unknown method ids.
void validate_config(const ExperimentConfig& config);

/// One (proportion, replicate, method) outcome. Rank vectors hold feature
/// names so persisted records are self-describing. A non-empty `error` marks
/// a failed trial; such records carry no metrics and are skipped by
/// aggregation. Wall time is measurement metadata and is not serialized into
/// records.jsonl (which must be byte-reproducible).
struct TrialRecord {
  std::string dataset_id;
  std::string method_id;
  double proportion = 0.0;
  std::size_t p_index = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  std::optional<std::vector<std::string>> global_ranks;
  std::optional<std::vector<std::vector<std::string>>> local_ranks;  // per probe
  std::string error;
  double wall_time_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<std::string> feature_names;
  std::size_t probe_count = 0;
  std::size_t error_count = 0;
};

/// The full sweep: for every proportion, `replicates` bootstrap samples are
/// drawn from the master-seed train split; every requested method is fit and
/// explained on each sample; F1 is measured on the fixed test set. Probe
/// instances are the first `probe_count` test rows and stay fixed for the
/// whole experiment. Deterministic for a given config, independent of `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace rankstab
