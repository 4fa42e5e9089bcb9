#include "rankstab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "rankstab/error.hpp"
#include "rankstab/rankmetrics.hpp"
#include "rankstab/seeds.hpp"

namespace rankstab {

const std::vector<MethodSpec>& method_catalog() {
  static const std::vector<MethodSpec> catalog = {
      {"logistic+rcm", ModelKind::Logistic, ExplainerKind::Rcm, true, true},
      {"forest+mdi", ModelKind::Forest, ExplainerKind::Mdi, true, false},
      {"forest+shap", ModelKind::Forest, ExplainerKind::Shap, true, true},
      {"forest+lime", ModelKind::Forest, ExplainerKind::Lime, false, true},
      {"boosted+mdi", ModelKind::Boosted, ExplainerKind::Mdi, true, false},
      {"boosted+shap", ModelKind::Boosted, ExplainerKind::Shap, true, true},
      {"boosted+lime", ModelKind::Boosted, ExplainerKind::Lime, false, true},
      {"additive+self", ModelKind::Additive, ExplainerKind::SelfExplain, true, true},
  };
  return catalog;
}

const MethodSpec* find_method(std::string_view id) {
  for (const MethodSpec& spec : method_catalog()) {
    if (spec.id == id) return &spec;
  }
  return nullptr;
}

void validate_config(const ExperimentConfig& config) {
  if (config.dataset_path.empty()) {
    raise(ErrorCode::ConfigInvalid, "dataset path is required");
  }
  if (config.label_column.empty()) {
    raise(ErrorCode::ConfigInvalid, "label column is required");
  }
  if (config.proportions.empty()) {
    raise(ErrorCode::ConfigInvalid, "proportion grid is empty");
  }
  for (double proportion : config.proportions) {
    if (!(proportion > 0.0 && proportion <= 1.0)) {
      raise(ErrorCode::ConfigInvalid,
            "proportions must lie in (0, 1], got " + std::to_string(proportion));
    }
  }
  if (config.replicates < 2) {
    raise(ErrorCode::ConfigInvalid, "replicates must be >= 2");
  }
  if (config.probe_count < 1) {
    raise(ErrorCode::ConfigInvalid, "probe_count must be >= 1");
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    raise(ErrorCode::ConfigInvalid, "train_fraction must be in (0, 1)");
  }
  if (config.explain.shap_background_rows < 1 || config.explain.shap_global_instances < 1 ||
      config.explain.shap_permutations < 1) {
    raise(ErrorCode::ConfigInvalid, "SHAP budgets must be >= 1");
  }
  for (const std::string& id : config.methods) {
    if (find_method(id) == nullptr) {
      raise(ErrorCode::ConfigInvalid, "unknown method id '" + id + "'");
    }
  }
}

namespace {

struct TrialContext {
  const ExperimentConfig& config;
  std::string dataset_id;
  const Dataset& train;
  const Dataset& test;
  RowMatrix probes;            // probe_count x P
  RowMatrix global_instances;  // capped test rows for global SHAP
  std::vector<const MethodSpec*> methods;
};

RowMatrix top_rows(const RowMatrix& source, std::size_t count) {
  RowMatrix out(static_cast<Eigen::Index>(count), source.cols());
  out = source.topRows(static_cast<Eigen::Index>(count));
  return out;
}

std::vector<std::string> names_for(const RankVector& ranks,
                                   const std::vector<std::string>& feature_names) {
  std::vector<std::string> names;
  names.reserve(ranks.size());
  for (int index : ranks) names.push_back(feature_names[static_cast<std::size_t>(index)]);
  return names;
}

std::unique_ptr<Model> fit_model(const MethodSpec& method, const Dataset& sample,
                                 const ModelParams& params, std::uint64_t seed) {
  switch (method.model) {
    case ModelKind::Logistic:
      return std::make_unique<LogisticModel>(fit_logistic(sample, params.logistic));
    case ModelKind::Forest:
      return std::make_unique<ForestModel>(fit_forest(sample, params.forest, seed));
    case ModelKind::Boosted:
      return std::make_unique<BoostedModel>(fit_boosted(sample, params.boosted));
    case ModelKind::Additive:
      return std::make_unique<AdditiveModel>(fit_additive(sample, params.additive));
  }
  raise(ErrorCode::ConfigInvalid, "unhandled model kind");
}

ImportanceVector global_importance(const MethodSpec& method, const Model& model,
                                   const TrialContext& context, const RowMatrix& background,
                                   std::uint64_t shap_seed) {
  switch (method.explainer) {
    case ExplainerKind::Rcm:
      return rcm_global(dynamic_cast<const LogisticModel&>(model));
    case ExplainerKind::Mdi:
      if (const auto* forest = dynamic_cast<const ForestModel*>(&model)) {
        return mdi_global(*forest);
      }
      return mdi_global(dynamic_cast<const BoostedModel&>(model));
    case ExplainerKind::Shap: {
      ShapOptions options;
      options.exact_max_features = context.config.explain.shap_exact_max_features;
      options.n_permutations = context.config.explain.shap_permutations;
      options.seed = shap_seed;
      return shap_global(model, context.global_instances, background, options);
    }
    case ExplainerKind::SelfExplain:
      return additive_global(dynamic_cast<const AdditiveModel&>(model));
    case ExplainerKind::Lime:
      break;
  }
  raise(ErrorCode::ConfigInvalid, "method has no global scope");
}

ImportanceVector local_importance(const MethodSpec& method, const Model& model,
                                  const TrialContext& context, const RowMatrix& background,
                                  std::span<const double> probe, std::uint64_t seed) {
  switch (method.explainer) {
    case ExplainerKind::Rcm:
      return rcm_local(dynamic_cast<const LogisticModel&>(model), probe);
    case ExplainerKind::Shap: {
      ShapOptions options;
      options.exact_max_features = context.config.explain.shap_exact_max_features;
      options.n_permutations = context.config.explain.shap_permutations;
      options.seed = seed;
      const ShapleyExplanation explanation = shap_auto(model, probe, background, options);
      std::vector<double> scores(explanation.phi.size());
      for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = std::abs(explanation.phi[j]);
      return ImportanceVector{std::move(scores), Scope::Local, -1};
    }
    case ExplainerKind::Lime: {
      LimeConfig lime;
      lime.n_samples = context.config.explain.lime_samples;
      lime.kernel_width = context.config.explain.lime_kernel_width;
      lime.ridge = context.config.explain.lime_ridge;
      return lime_local(model, probe, background, lime, seed).importance();
    }
    case ExplainerKind::SelfExplain:
      return additive_local(dynamic_cast<const AdditiveModel&>(model), probe);
    case ExplainerKind::Mdi:
      break;
  }
  raise(ErrorCode::ConfigInvalid, "method has no local scope");
}

TrialRecord run_trial(const TrialContext& context, std::size_t p_index, std::size_t replicate,
                      const MethodSpec& method) {
  const ExperimentConfig& config = context.config;
  TrialRecord record;
  record.dataset_id = context.dataset_id;
  record.method_id = method.id;
  record.proportion = config.proportions[p_index];
  record.p_index = p_index;
  record.replicate = replicate;
  record.seed = derive_seed(config.master_seed, context.dataset_id, p_index, replicate, method.id);

  const auto started = std::chrono::steady_clock::now();
  try {
    const std::uint64_t sample_seed =
        derive_seed(config.master_seed, context.dataset_id, p_index, replicate, "bootstrap");
    const Dataset sample =
        subsample_bootstrap(context.train, record.proportion, sample_seed);

    const std::unique_ptr<Model> model = fit_model(method, sample, config.models, record.seed);
    record.f1 = f1_score(model->predict_labels(context.test.features), context.test.labels);

    const std::size_t background_rows =
        std::min(config.explain.shap_background_rows, sample.rows());
    const RowMatrix background = top_rows(sample.features, background_rows);

    if (method.global_scope) {
      const std::uint64_t shap_seed = derive_seed(config.master_seed, context.dataset_id,
                                                  p_index, replicate, method.id + "/global");
      const ImportanceVector importance =
          global_importance(method, *model, context, background, shap_seed);
      record.global_ranks = names_for(rank_features(importance), context.train.feature_names);
    }
    if (method.local_scope) {
      std::vector<std::vector<std::string>> locals;
      locals.reserve(config.probe_count);
      for (std::size_t probe = 0; probe < config.probe_count; ++probe) {
        const std::uint64_t seed =
            derive_seed(config.master_seed, context.dataset_id, p_index, replicate,
                        method.id + "/probe/" + std::to_string(probe));
        const std::span<const double> row{
            context.probes.data() + probe * context.train.cols(), context.train.cols()};
        const ImportanceVector importance =
            local_importance(method, *model, context, background, row, seed);
        locals.push_back(names_for(rank_features(importance), context.train.feature_names));
      }
      record.local_ranks = std::move(locals);
    }
  } catch (const std::exception& e) {
    record.error = e.what();
    record.f1 = 0.0;
    record.global_ranks.reset();
    record.local_ranks.reset();
  }
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return record;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  Dataset dataset = [&] {
    try {
      return load_csv(config.dataset_path, config.label_column);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DatasetLoad) throw;
      throw Error(ErrorCode::DatasetLoad, e.what());
    }
  }();

  const std::string dataset_id = config.dataset_id.empty()
                                     ? std::filesystem::path(config.dataset_path).stem().string()
                                     : config.dataset_id;

  const SplitPair split = train_test_split(dataset, config.train_fraction, config.master_seed);
  if (config.probe_count > split.test.rows()) {
    raise(ErrorCode::ConfigInvalid, "probe_count exceeds test partition size");
  }

  TrialContext ctx{
      .config = config,
      .dataset_id = dataset_id,
      .train = split.train,
      .test = split.test,
      .probes = top_rows(split.test.features, config.probe_count),
      .global_instances = top_rows(
          split.test.features,
          std::min(config.explain.shap_global_instances, split.test.rows())),
      .methods = {},
  };

  std::vector<std::string> method_ids = config.methods;
  if (method_ids.empty()) {
    for (const MethodSpec& spec : method_catalog()) method_ids.push_back(spec.id);
  }
  for (const std::string& id : method_ids) ctx.methods.push_back(find_method(id));

  const std::size_t n_tasks =
      config.proportions.size() * config.replicates * ctx.methods.size();
  std::vector<TrialRecord> records(n_tasks);

  const std::size_t methods_n = ctx.methods.size();
  const std::size_t replicates_n = config.replicates;
  auto run_task = [&](std::size_t task) {
    const std::size_t method_index = task % methods_n;
    const std::size_t replicate = (task / methods_n) % replicates_n;
    const std::size_t p_index = task / (methods_n * replicates_n);
    records[task] = run_trial(ctx, p_index, replicate, *ctx.methods[method_index]);
  };

  std::size_t jobs = config.jobs;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n_tasks);

  if (jobs <= 1) {
    for (std::size_t task = 0; task < n_tasks; ++task) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t task = next.fetch_add(1);
        if (task >= n_tasks) break;
        run_task(task);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs - 1);
    for (std::size_t t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& thread : pool) thread.join();
  }

  ExperimentResult result;
  result.records = std::move(records);
  result.feature_names = dataset.feature_names;
  result.probe_count = config.probe_count;
  for (const TrialRecord& record : result.records) {
    if (!record.error.empty()) ++result.error_count;
  }
  return result;
}

}  // namespace rankstab
