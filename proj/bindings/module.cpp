#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankstab/aggregate.hpp"
#include "rankstab/config_file.hpp"
#include "rankstab/dataset.hpp"
#include "rankstab/error.hpp"
#include "rankstab/experiment.hpp"
#include "rankstab/explain.hpp"
#include "rankstab/lime.hpp"
#include "rankstab/models.hpp"
#include "rankstab/rankmetrics.hpp"
#include "rankstab/records_io.hpp"
#include "rankstab/shap.hpp"
#include "rankstab/version.hpp"

namespace py = pybind11;
using namespace rankstab;

namespace {

std::vector<double> as_row(const Eigen::VectorXd& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

ImportanceVector shap_importance(const ShapleyExplanation& explanation) {
  std::vector<double> scores(explanation.phi.size());
  for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = std::abs(explanation.phi[j]);
  return ImportanceVector{std::move(scores), Scope::Local, explanation.instance_id};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "accuracy-vs-interpretation-quality experiment core";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "RankstabError");

  // ---- data -------------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const RowMatrix& features, const std::vector<int>& labels,
                       const std::vector<std::string>& names) {
             return Dataset::create(features, labels, names);
           }),
           py::arg("features"), py::arg("labels"), py::arg("feature_names"))
      .def_property_readonly("features", [](const Dataset& d) { return d.features; })
      .def_property_readonly("labels", [](const Dataset& d) { return d.labels; })
      .def_property_readonly("feature_names", [](const Dataset& d) { return d.feature_names; })
      .def_property_readonly("rows", &Dataset::rows)
      .def_property_readonly("cols", &Dataset::cols);

  py::class_<SplitPair>(m, "SplitPair")
      .def_readonly("train", &SplitPair::train)
      .def_readonly("test", &SplitPair::test)
      .def_readonly("seed", &SplitPair::seed);

  py::class_<Standardizer>(m, "Standardizer")
      .def_property_readonly("mean", [](const Standardizer& s) { return s.mean; })
      .def_property_readonly("stddev", [](const Standardizer& s) { return s.stddev; });

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_column"));
  m.def("train_test_split", &train_test_split, py::arg("dataset"), py::arg("train_fraction"),
        py::arg("seed"));
  m.def("subsample_bootstrap", &subsample_bootstrap, py::arg("train"), py::arg("proportion"),
        py::arg("seed"));
  m.def("fit_standardizer", &fit_standardizer, py::arg("dataset"));
  m.def("apply_standardizer", &apply_standardizer, py::arg("standardizer"), py::arg("dataset"));

  // ---- models -------------------------------------------------------------
  py::class_<LogisticConfig>(m, "LogisticConfig")
      .def(py::init<>())
      .def_readwrite("l2", &LogisticConfig::l2)
      .def_readwrite("max_iterations", &LogisticConfig::max_iterations)
      .def_readwrite("tolerance", &LogisticConfig::tolerance);
  py::class_<TreeConfig>(m, "TreeConfig")
      .def(py::init<>())
      .def_readwrite("max_depth", &TreeConfig::max_depth)
      .def_readwrite("min_samples_split", &TreeConfig::min_samples_split);
  py::class_<ForestConfig>(m, "ForestConfig")
      .def(py::init<>())
      .def_readwrite("n_trees", &ForestConfig::n_trees)
      .def_readwrite("feature_subset", &ForestConfig::feature_subset)
      .def_readwrite("tree", &ForestConfig::tree);
  py::class_<BoostedConfig>(m, "BoostedConfig")
      .def(py::init<>())
      .def_readwrite("rounds", &BoostedConfig::rounds)
      .def_readwrite("learning_rate", &BoostedConfig::learning_rate)
      .def_readwrite("max_depth", &BoostedConfig::max_depth)
      .def_readwrite("min_samples_split", &BoostedConfig::min_samples_split);
  py::class_<AdditiveConfig>(m, "AdditiveConfig")
      .def(py::init<>())
      .def_readwrite("cycles", &AdditiveConfig::cycles)
      .def_readwrite("bins", &AdditiveConfig::bins)
      .def_readwrite("learning_rate", &AdditiveConfig::learning_rate);

  py::class_<Model>(m, "Model")
      .def_property_readonly("feature_count", &Model::feature_count)
      .def("predict_proba", &Model::predict_proba, py::arg("instances"))
      .def("predict_labels", &Model::predict_labels, py::arg("instances"))
      .def("predict_proba_one",
           [](const Model& model, const Eigen::VectorXd& x) {
             const std::vector<double> row = as_row(x);
             return model.predict_proba_one(row);
           },
           py::arg("x"));

  py::class_<LogisticModel, Model>(m, "LogisticModel")
      .def_property_readonly("intercept", &LogisticModel::intercept)
      .def_property_readonly("coefficients",
                             [](const LogisticModel& m_) { return m_.coefficients(); });
  py::class_<DecisionTree, Model>(m, "DecisionTree")
      .def_property_readonly("depth", &DecisionTree::depth);
  py::class_<ForestModel, Model>(m, "ForestModel")
      .def_property_readonly("n_trees", [](const ForestModel& m_) { return m_.trees().size(); });
  py::class_<BoostedModel, Model>(m, "BoostedModel")
      .def_property_readonly("initial_logit", &BoostedModel::initial_logit)
      .def_property_readonly("n_trees", [](const BoostedModel& m_) { return m_.trees().size(); });
  py::class_<AdditiveModel, Model>(m, "AdditiveModel")
      .def_property_readonly("intercept", &AdditiveModel::intercept);

  m.def("fit_logistic", &fit_logistic, py::arg("dataset"), py::arg("config") = LogisticConfig{});
  m.def("fit_tree", &fit_tree, py::arg("dataset"), py::arg("config") = TreeConfig{});
  m.def("fit_forest", &fit_forest, py::arg("dataset"), py::arg("config") = ForestConfig{},
        py::arg("seed") = 0);
  m.def("fit_boosted", &fit_boosted, py::arg("dataset"), py::arg("config") = BoostedConfig{});
  m.def("fit_additive", &fit_additive, py::arg("dataset"), py::arg("config") = AdditiveConfig{});

  // ---- explanations -------------------------------------------------------
  py::enum_<Scope>(m, "Scope").value("GLOBAL", Scope::Global).value("LOCAL", Scope::Local);

  py::class_<ImportanceVector>(m, "ImportanceVector")
      .def_readonly("scores", &ImportanceVector::scores)
      .def_readonly("scope", &ImportanceVector::scope)
      .def("ranks", [](const ImportanceVector& iv) { return rank_features(iv); });

  py::class_<ShapleyExplanation>(m, "ShapleyExplanation")
      .def_readonly("base_value", &ShapleyExplanation::base_value)
      .def_readonly("phi", &ShapleyExplanation::phi)
      .def_readonly("n_permutations", &ShapleyExplanation::n_permutations)
      .def("total", &ShapleyExplanation::total)
      .def("importance", &shap_importance);

  py::class_<LimeConfig>(m, "LimeConfig")
      .def(py::init<>())
      .def_readwrite("n_samples", &LimeConfig::n_samples)
      .def_readwrite("kernel_width", &LimeConfig::kernel_width)
      .def_readwrite("ridge", &LimeConfig::ridge);

  py::class_<LimeExplanation>(m, "LimeExplanation")
      .def_readonly("intercept", &LimeExplanation::intercept)
      .def_readonly("coefficients", &LimeExplanation::coefficients)
      .def_readonly("kernel_width", &LimeExplanation::kernel_width)
      .def_readonly("n_samples", &LimeExplanation::n_samples)
      .def("importance", &LimeExplanation::importance);

  m.def("rank_features",
        [](const std::vector<double>& scores) { return rank_features(scores); },
        py::arg("scores"));
  m.def("rcm_global", &rcm_global, py::arg("model"));
  m.def("rcm_local",
        [](const LogisticModel& model, const Eigen::VectorXd& x) {
          return rcm_local(model, as_row(x));
        },
        py::arg("model"), py::arg("x"));
  m.def("mdi_global", py::overload_cast<const DecisionTree&>(&mdi_global), py::arg("model"));
  m.def("mdi_global", py::overload_cast<const ForestModel&>(&mdi_global), py::arg("model"));
  m.def("mdi_global", py::overload_cast<const BoostedModel&>(&mdi_global), py::arg("model"));
  m.def("additive_local",
        [](const AdditiveModel& model, const Eigen::VectorXd& x) {
          return additive_local(model, as_row(x));
        },
        py::arg("model"), py::arg("x"));
  m.def("additive_global", &additive_global, py::arg("model"));

  m.def("shap_exact",
        [](const Model& model, const Eigen::VectorXd& x, const Dataset& background,
           std::size_t max_features) {
          return shap_exact(model, as_row(x), background, max_features);
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("max_features") = 15);
  m.def("shap_sampled",
        [](const Model& model, const Eigen::VectorXd& x, const Dataset& background,
           std::size_t n_permutations, std::uint64_t seed, bool enumerate_all) {
          return shap_sampled(model, as_row(x), background, n_permutations, seed, enumerate_all);
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("n_permutations"),
        py::arg("seed"), py::arg("enumerate_all") = false);
  m.def("shap_global",
        [](const Model& model, const RowMatrix& instances, const Dataset& background,
           std::size_t exact_max_features, std::size_t n_permutations, std::uint64_t seed) {
          ShapOptions options;
          options.exact_max_features = exact_max_features;
          options.n_permutations = n_permutations;
          options.seed = seed;
          return shap_global(model, instances, background, options);
        },
        py::arg("model"), py::arg("instances"), py::arg("background"),
        py::arg("exact_max_features") = 15, py::arg("n_permutations") = 500, py::arg("seed") = 0);
  m.def("lime_local",
        [](const Model& model, const Eigen::VectorXd& x, const Dataset& background,
           const LimeConfig& config, std::uint64_t seed) {
          return lime_local(model, as_row(x), background, config, seed);
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("config") = LimeConfig{},
        py::arg("seed") = 0);

  // ---- rank metrics -------------------------------------------------------
  py::class_<StabilityScore>(m, "StabilityScore")
      .def_readonly("value", &StabilityScore::value)
      .def_readonly("n_rankings", &StabilityScore::n_rankings)
      .def_readonly("truncation", &StabilityScore::truncation)
      .def_readonly("pair_count", &StabilityScore::pair_count);
  py::class_<TruenessScore>(m, "TruenessScore")
      .def_readonly("p_mode", &TruenessScore::p_mode)
      .def_readonly("modal_top3", &TruenessScore::modal_top3)
      .def_readonly("n_rankings", &TruenessScore::n_rankings);
  py::class_<PerturbationInterval>(m, "PerturbationInterval")
      .def_readonly("center", &PerturbationInterval::center)
      .def_readonly("lower", &PerturbationInterval::lower)
      .def_readonly("upper", &PerturbationInterval::upper);

  py::enum_<PairWeighting>(m, "PairWeighting")
      .value("RECIPROCAL_MIN_POSITION", PairWeighting::ReciprocalMinPosition)
      .value("UNIFORM", PairWeighting::Uniform);
  m.def("kendall_tau", &kendall_tau, py::arg("r1"), py::arg("r2"));
  m.def("wkt_distance", &wkt_distance, py::arg("r1"), py::arg("r2"), py::arg("truncation") = 10,
        py::arg("weighting") = PairWeighting::ReciprocalMinPosition);
  m.def("stability", &stability, py::arg("rankings"), py::arg("truncation") = 10);
  m.def("p_mode", &p_mode, py::arg("rankings"));
  m.def("f1_score", &f1_score, py::arg("predicted"), py::arg("actual"));
  m.def("bucketize", [](double f1) -> py::object {
    const auto bucket = bucketize(f1);
    if (!bucket) return py::none();
    return py::str(bucket_name(bucket->label));
  });
  m.def("perturbation_interval", &perturbation_interval, py::arg("values"),
        py::arg("lower_percentile") = 10.0, py::arg("upper_percentile") = 90.0);

  // ---- experiment harness ---------------------------------------------------
  py::class_<ExplainParams>(m, "ExplainParams")
      .def(py::init<>())
      .def_readwrite("shap_exact_max_features", &ExplainParams::shap_exact_max_features)
      .def_readwrite("shap_permutations", &ExplainParams::shap_permutations)
      .def_readwrite("shap_background_rows", &ExplainParams::shap_background_rows)
      .def_readwrite("shap_global_instances", &ExplainParams::shap_global_instances)
      .def_readwrite("lime_samples", &ExplainParams::lime_samples)
      .def_readwrite("lime_kernel_width", &ExplainParams::lime_kernel_width)
      .def_readwrite("lime_ridge", &ExplainParams::lime_ridge);
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("logistic", &ModelParams::logistic)
      .def_readwrite("forest", &ModelParams::forest)
      .def_readwrite("boosted", &ModelParams::boosted)
      .def_readwrite("additive", &ModelParams::additive);
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("dataset_path", &ExperimentConfig::dataset_path)
      .def_readwrite("label_column", &ExperimentConfig::label_column)
      .def_readwrite("dataset_id", &ExperimentConfig::dataset_id)
      .def_readwrite("proportions", &ExperimentConfig::proportions)
      .def_readwrite("replicates", &ExperimentConfig::replicates)
      .def_readwrite("probe_count", &ExperimentConfig::probe_count)
      .def_readwrite("methods", &ExperimentConfig::methods)
      .def_readwrite("models", &ExperimentConfig::models)
      .def_readwrite("explain", &ExperimentConfig::explain)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("train_fraction", &ExperimentConfig::train_fraction)
      .def_readwrite("jobs", &ExperimentConfig::jobs);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("dataset_id", &TrialRecord::dataset_id)
      .def_readonly("method_id", &TrialRecord::method_id)
      .def_readonly("proportion", &TrialRecord::proportion)
      .def_readonly("p_index", &TrialRecord::p_index)
      .def_readonly("replicate", &TrialRecord::replicate)
      .def_readonly("seed", &TrialRecord::seed)
      .def_readonly("f1", &TrialRecord::f1)
      .def_readonly("global_ranks", &TrialRecord::global_ranks)
      .def_readonly("local_ranks", &TrialRecord::local_ranks)
      .def_readonly("error", &TrialRecord::error);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("records", &ExperimentResult::records)
      .def_readonly("feature_names", &ExperimentResult::feature_names)
      .def_readonly("probe_count", &ExperimentResult::probe_count)
      .def_readonly("error_count", &ExperimentResult::error_count);

  py::class_<CurveRow>(m, "CurveRow")
      .def_readonly("dataset_id", &CurveRow::dataset_id)
      .def_readonly("method_id", &CurveRow::method_id)
      .def_readonly("scope", &CurveRow::scope)
      .def_readonly("proportion", &CurveRow::proportion)
      .def_readonly("n_ok", &CurveRow::n_ok)
      .def_readonly("n_error", &CurveRow::n_error)
      .def_readonly("mean_f1", &CurveRow::mean_f1)
      .def_readonly("stability", &CurveRow::stability_value)
      .def_readonly("p_mode", &CurveRow::p_mode_value);

  py::class_<BucketSummary>(m, "BucketSummary")
      .def_readonly("method_id", &BucketSummary::method_id)
      .def_readonly("scope", &BucketSummary::scope)
      .def_property_readonly("bucket",
                             [](const BucketSummary& s) { return bucket_name(s.bucket); })
      .def_readonly("cell_count", &BucketSummary::cell_count)
      .def_readonly("mean_stability", &BucketSummary::mean_stability)
      .def_readonly("mean_p_mode", &BucketSummary::mean_p_mode);

  m.def("method_ids", [] {
    std::vector<std::string> ids;
    for (const MethodSpec& spec : method_catalog()) ids.push_back(spec.id);
    return ids;
  });
  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("aggregate_curves",
        py::overload_cast<const std::vector<TrialRecord>&, std::size_t>(&aggregate_curves),
        py::arg("records"), py::arg("truncation") = 10);
  m.def("aggregate_buckets",
        py::overload_cast<const std::vector<TrialRecord>&, std::size_t>(&aggregate_buckets),
        py::arg("records"), py::arg("truncation") = 10);
  m.def("read_records_jsonl", &read_records_jsonl, py::arg("path"));
  m.def("write_records_jsonl", &write_records_jsonl, py::arg("path"), py::arg("records"));
}
