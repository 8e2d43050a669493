#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfaudit/classifier.hpp"
#include "cfaudit/counterfactual.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/fairness.hpp"
#include "cfaudit/harness.hpp"
#include "cfaudit/synthgen.hpp"

namespace py = pybind11;
using namespace cfaudit;

namespace {

py::object optional_to_py(const std::optional<double>& value) {
  if (!value) return py::none();
  return py::float_(*value);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fairness audits from counterfactual boundary distances";
  m.attr("__version__") = CFAUDIT_VERSION;

  // dataset -----------------------------------------------------------------
  py::class_<DataPoint>(m, "DataPoint")
      .def_readonly("x", &DataPoint::x)
      .def_readonly("s", &DataPoint::s)
      .def_readonly("y", &DataPoint::y);

  py::class_<FeatureSchema>(m, "FeatureSchema")
      .def_property_readonly("column_count", &FeatureSchema::column_count)
      .def_property_readonly("legitimate_count", &FeatureSchema::legitimate_count)
      .def("legitimate_names", &FeatureSchema::legitimate_names);

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("schema", &Dataset::schema)
      .def_property_readonly("sensitive_column", &Dataset::sensitive_column)
      .def_property_readonly("favorable_label_raw", &Dataset::favorable_label_raw)
      .def("point", &Dataset::point, py::arg("index"))
      .def("points", &Dataset::points)
      .def("rows", &Dataset::rows)
      .def("with_sensitive", &Dataset::with_sensitive, py::arg("name"));

  py::class_<SchemaFile>(m, "SchemaFile")
      .def_readonly("schema", &SchemaFile::schema)
      .def_readonly("favorable_label_raw", &SchemaFile::favorable_label_raw);

  m.def("load_schema", &load_schema, py::arg("path"));
  m.def("load_csv", &load_csv, py::arg("path"), py::arg("schema"),
        py::arg("favorable_label_raw"));
  m.def(
      "clean",
      [](const Dataset& d) {
        CleanResult r = clean(d);
        return py::make_tuple(std::move(r.dataset), r.removed_rows);
      },
      py::arg("dataset"), "Returns (cleaned_dataset, removed_row_count).");
  m.def("sample", &sample, py::arg("dataset"), py::arg("n"), py::arg("seed"));
  m.def(
      "split",
      [](const Dataset& d) {
        SplitResult r = split(d);
        return py::make_tuple(std::move(r.features), std::move(r.sensitive),
                              std::move(r.labels));
      },
      py::arg("dataset"), "Returns (features, sensitive, labels).");
  m.def("write_csv", &write_csv, py::arg("dataset"), py::arg("path"));

  // synthgen ------------------------------------------------------------------
  py::class_<SyntheticRow>(m, "SyntheticRow")
      .def(py::init([](double mu_x1, double mu_x2, int s, int y, std::size_t count) {
             return SyntheticRow{mu_x1, mu_x2, s, y, count};
           }),
           py::arg("mu_x1"), py::arg("mu_x2"), py::arg("s"), py::arg("y"), py::arg("count"))
      .def_readwrite("mu_x1", &SyntheticRow::mu_x1)
      .def_readwrite("mu_x2", &SyntheticRow::mu_x2)
      .def_readwrite("s", &SyntheticRow::s)
      .def_readwrite("y", &SyntheticRow::y)
      .def_readwrite("count", &SyntheticRow::count);

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("rows", &SyntheticSpec::rows)
      .def_readwrite("sigma", &SyntheticSpec::sigma)
      .def("total_count", &SyntheticSpec::total_count);

  m.def("preset_da", &preset_da);
  m.def("preset_db", &preset_db);
  m.def("generate", &generate, py::arg("spec"), py::arg("seed"));

  // classifier ----------------------------------------------------------------
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("iterations", &TrainConfig::iterations)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("random_init", &TrainConfig::random_init)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def_readwrite("batch_size", &TrainConfig::batch_size);

  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init<>())
      .def_readwrite("weights", &LinearModel::weights)
      .def_readwrite("bias", &LinearModel::bias)
      .def_readwrite("feature_names", &LinearModel::feature_names)
      .def_property_readonly("feature_count", &LinearModel::feature_count);

  m.def("train",
        [](const Matrix& features, const std::vector<int>& labels, const TrainConfig& config) {
          return train(features, labels, config);
        },
        py::arg("features"), py::arg("labels"), py::arg("config") = TrainConfig{});
  m.def("predict_proba", &predict_proba, py::arg("model"), py::arg("x"));
  m.def("predict", &predict, py::arg("model"), py::arg("x"));
  m.def("predict_all", &predict_all, py::arg("model"), py::arg("features"));
  m.def("accuracy", &accuracy, py::arg("model"), py::arg("features"), py::arg("labels"));
  m.def("signed_boundary_distance", &signed_boundary_distance, py::arg("model"), py::arg("x"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("config"), py::arg("path"));
  m.def(
      "load_model",
      [](const std::string& path) {
        ModelFile mf = load_model(path);
        return py::make_tuple(std::move(mf.model), mf.config);
      },
      py::arg("path"), "Returns (model, train_config).");

  // counterfactual ------------------------------------------------------------
  py::enum_<DistanceMetric>(m, "DistanceMetric")
      .value("euclidean", DistanceMetric::euclidean)
      .value("manhattan", DistanceMetric::manhattan);

  py::class_<FeatureRange>(m, "FeatureRange")
      .def(py::init([](double lo, double hi) { return FeatureRange{lo, hi}; }),
           py::arg("min"), py::arg("max"))
      .def_readwrite("min", &FeatureRange::min)
      .def_readwrite("max", &FeatureRange::max);

  py::class_<GaConfig>(m, "GaConfig")
      .def(py::init<>())
      .def_static("paper_profile", &GaConfig::paper_profile)
      .def_static("desk_profile", &GaConfig::desk_profile)
      .def_readwrite("population_size", &GaConfig::population_size)
      .def_readwrite("retained_after_selection", &GaConfig::retained_after_selection)
      .def_readwrite("retained_for_next_generation", &GaConfig::retained_for_next_generation)
      .def_readwrite("generations", &GaConfig::generations)
      .def_readwrite("mutation_probability", &GaConfig::mutation_probability)
      .def_readwrite("crossover_probability", &GaConfig::crossover_probability)
      .def_readwrite("feature_ranges", &GaConfig::feature_ranges)
      .def_readwrite("metric", &GaConfig::metric)
      .def_readwrite("seed", &GaConfig::seed);

  py::class_<Counterfactual>(m, "Counterfactual")
      .def_readonly("origin_index", &Counterfactual::origin_index)
      .def_readonly("c_star", &Counterfactual::c_star)
      .def_readonly("distance", &Counterfactual::distance)
      .def_readonly("generations_run", &Counterfactual::generations_run)
      .def_readonly("valid", &Counterfactual::valid)
      .def_readonly("best_distance_trace", &Counterfactual::best_distance_trace);

  m.def("distance", &distance, py::arg("x"), py::arg("c"), py::arg("metric"));
  m.def("fitness", &fitness, py::arg("x"), py::arg("c"), py::arg("metric"));
  m.def("ranges_from", &ranges_from, py::arg("features"));
  m.def("generate_counterfactual", &generate_counterfactual, py::arg("model"), py::arg("x"),
        py::arg("config"), py::arg("origin_index") = 0);
  m.def("oracle_projection", &oracle_projection, py::arg("model"), py::arg("x"),
        py::arg("origin_index") = 0);
  m.def(
      "generate_all",
      [](const LinearModel& model, const Dataset& dataset, int target_class,
         const GaConfig& config) { return generate_all(model, dataset, target_class, config); },
      py::arg("model"), py::arg("dataset"), py::arg("target_class"), py::arg("config"));
  m.def(
      "generate_all_features",
      [](const LinearModel& model, const Matrix& features, int target_class,
         const GaConfig& config) { return generate_all(model, features, target_class, config); },
      py::arg("model"), py::arg("features"), py::arg("target_class"), py::arg("config"));

  // fairness --------------------------------------------------------------------
  py::enum_<DisparateImpactRule>(m, "DisparateImpactRule")
      .value("two_sided", DisparateImpactRule::two_sided)
      .value("one_sided", DisparateImpactRule::one_sided);

  m.def("acceptance_rate", &acceptance_rate, py::arg("predictions"), py::arg("groups"),
        py::arg("group_value"));
  m.def(
      "statistical_parity",
      [](const std::vector<int>& predictions, const std::vector<int>& groups) {
        return optional_to_py(statistical_parity(predictions, groups));
      },
      py::arg("predictions"), py::arg("groups"));
  m.def("disparate_impact", &disparate_impact, py::arg("sp"),
        py::arg("rule") = DisparateImpactRule::two_sided);

  py::class_<BurdenStat>(m, "BurdenStat")
      .def_property_readonly("mean", [](const BurdenStat& b) { return optional_to_py(b.mean); })
      .def_readonly("negatives", &BurdenStat::negatives)
      .def_readonly("valid_used", &BurdenStat::valid_used)
      .def_readonly("invalid", &BurdenStat::invalid);

  m.def("burden", &burden, py::arg("counterfactuals"), py::arg("groups"),
        py::arg("predictions"), py::arg("group_value"));
  m.def("burden_ratio",
        [](const BurdenStat& low, const BurdenStat& high) {
          return optional_to_py(burden_ratio(low, high));
        },
        py::arg("low_group"), py::arg("high_group"));

  py::class_<FairnessConfig>(m, "FairnessConfig")
      .def(py::init<>())
      .def_readwrite("rule", &FairnessConfig::rule);

  py::class_<FairnessReport>(m, "FairnessReport")
      .def_readonly("acceptance_rate_by_group", &FairnessReport::acceptance_rate_by_group)
      .def_property_readonly(
          "statistical_parity",
          [](const FairnessReport& r) { return optional_to_py(r.statistical_parity); })
      .def_property_readonly("disparate_impact",
                             [](const FairnessReport& r) -> py::object {
                               if (!r.disparate_impact) return py::none();
                               return py::bool_(*r.disparate_impact);
                             })
      .def_property_readonly("burden_by_group",
                             [](const FairnessReport& r) {
                               py::dict out;
                               for (const auto& [code, value] : r.burden_by_group)
                                 out[py::int_(code)] = optional_to_py(value);
                               return out;
                             })
      .def_property_readonly(
          "burden_ratio",
          [](const FairnessReport& r) { return optional_to_py(r.burden_ratio); })
      .def("to_json", [](const FairnessReport& r) { return r.to_json().dump(2); });

  m.def("build_report", &build_report, py::arg("model"), py::arg("dataset"),
        py::arg("counterfactuals"), py::arg("config") = FairnessConfig{});

  // harness -----------------------------------------------------------------------
  py::enum_<DataSource>(m, "DataSource")
      .value("preset_da", DataSource::preset_da)
      .value("preset_db", DataSource::preset_db)
      .value("csv", DataSource::csv);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("source", &ExperimentConfig::source)
      .def_readwrite("csv_path", &ExperimentConfig::csv_path)
      .def_readwrite("schema_path", &ExperimentConfig::schema_path)
      .def_readwrite("sensitive_column", &ExperimentConfig::sensitive_column)
      .def_readwrite("sample_size", &ExperimentConfig::sample_size)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("train", &ExperimentConfig::train)
      .def_readwrite("ga", &ExperimentConfig::ga)
      .def_readwrite("ga_profile", &ExperimentConfig::ga_profile)
      .def_readwrite("di_rule", &ExperimentConfig::di_rule)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir);

  py::class_<RunArtifacts>(m, "RunArtifacts")
      .def_readonly("dataset_csv", &RunArtifacts::dataset_csv)
      .def_readonly("dataset_schema", &RunArtifacts::dataset_schema)
      .def_readonly("model_file", &RunArtifacts::model_file)
      .def_readonly("counterfactual_dump", &RunArtifacts::counterfactual_dump)
      .def_readonly("report_file", &RunArtifacts::report_file)
      .def_readonly("plot_file", &RunArtifacts::plot_file)
      .def_readonly("meta_file", &RunArtifacts::meta_file)
      .def_readonly("stage_seconds", &RunArtifacts::stage_seconds)
      .def_readonly("accuracy", &RunArtifacts::accuracy)
      .def_readonly("report", &RunArtifacts::report);

  m.def("run_experiment", &run_experiment, py::arg("config"));
  m.def("emit_plot", &emit_plot, py::arg("dataset"), py::arg("model"),
        py::arg("counterfactuals"), py::arg("path"));
}
