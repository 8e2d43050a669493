#include "doctest.h"

#include <filesystem>

#include "cfaudit/harness.hpp"
#include "cfaudit/synthgen.hpp"
#include "test_util.hpp"

using namespace cfaudit;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRunSeed = 13;

ExperimentConfig preset_config(DataSource source, const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.seed = kRunSeed;
  cfg.output_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("experiment config JSON round trip") {
  ExperimentConfig cfg;
  cfg.source = DataSource::csv;
  cfg.csv_path = "data.csv";
  cfg.schema_path = "data.schema";
  cfg.sensitive_column = "SEX";
  cfg.sample_size = 1000;
  cfg.seed = 9;
  cfg.train.learning_rate = 0.01;
  cfg.ga_profile = "paper";
  cfg.ga = GaConfig::paper_profile();
  cfg.ga.mutation_probability = 0.33;
  cfg.di_rule = DisparateImpactRule::one_sided;
  cfg.output_dir = "out";

  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.source == DataSource::csv);
  CHECK(back.csv_path == "data.csv");
  CHECK(back.sensitive_column == "SEX");
  REQUIRE(back.sample_size.has_value());
  CHECK(*back.sample_size == 1000);
  CHECK(back.seed == 9);
  CHECK(back.train.learning_rate == 0.01);
  CHECK(back.ga_profile == "paper");
  CHECK(back.ga.population_size == 60000);
  CHECK(back.ga.mutation_probability == 0.33);
  CHECK(back.di_rule == DisparateImpactRule::one_sided);
  CHECK(back.to_json() == cfg.to_json());
}

TEST_CASE("ga profiles carry the documented sizes") {
  const GaConfig paper = GaConfig::paper_profile();
  CHECK(paper.population_size == 60000);
  CHECK(paper.retained_after_selection == 10000);
  CHECK(paper.retained_for_next_generation == 5000);
  CHECK(paper.generations == 10);
  CHECK(paper.mutation_probability == 0.2);
  CHECK(paper.crossover_probability == 0.5);

  const GaConfig desk = GaConfig::desk_profile();
  CHECK(desk.population_size == 600);
  CHECK(desk.retained_after_selection == 100);
  CHECK(desk.retained_for_next_generation == 50);
  CHECK(desk.generations == 10);
}

TEST_CASE("run_experiment produces the full artifact set and expected metrics") {
  testutil::TempDir tmp;
  const RunArtifacts run = run_experiment(preset_config(DataSource::preset_da, tmp.file("da")));

  CHECK(run.accuracy == 1.0);
  REQUIRE(run.report.statistical_parity.has_value());
  CHECK(*run.report.statistical_parity == 1.0);
  REQUIRE(run.report.burden_ratio.has_value());
  CHECK(*run.report.burden_ratio > 2.0);

  for (const std::string& path :
       {run.dataset_csv, run.dataset_schema, run.model_file, run.counterfactual_dump,
        run.report_file, run.plot_file, run.meta_file})
    CHECK(fs::exists(path));
  CHECK(run.stage_seconds.count("train") == 1);
  CHECK(run.stage_seconds.count("counterfactuals") == 1);
}

TEST_CASE("identical runs produce byte-identical fairness reports") {
  testutil::TempDir tmp;
  const RunArtifacts a = run_experiment(preset_config(DataSource::preset_db, tmp.file("one")));
  const RunArtifacts b = run_experiment(preset_config(DataSource::preset_db, tmp.file("two")));
  CHECK(testutil::read_file(a.report_file) == testutil::read_file(b.report_file));
  CHECK(testutil::read_file(a.counterfactual_dump) == testutil::read_file(b.counterfactual_dump));
  CHECK(testutil::read_file(a.model_file) == testutil::read_file(b.model_file));
}

TEST_CASE("the emitted report matches recomputation from the emitted artifacts") {
  testutil::TempDir tmp;
  const RunArtifacts run = run_experiment(preset_config(DataSource::preset_da, tmp.file("da")));

  const SchemaFile sf = load_schema(run.dataset_schema);
  const Dataset ds = load_csv(run.dataset_csv, sf.schema, sf.favorable_label_raw);
  const ModelFile mf = load_model(run.model_file);
  std::vector<Counterfactual> cfs;
  for (DumpRecord& rec : read_dump(run.counterfactual_dump)) cfs.push_back(rec.counterfactual);

  const SplitResult parts = split(ds);
  CHECK(accuracy(mf.model, parts.features, parts.labels) == run.accuracy);

  const FairnessReport recomputed = build_report(mf.model, ds, cfs);
  CHECK(recomputed.acceptance_rate_by_group == run.report.acceptance_rate_by_group);
  CHECK(*recomputed.statistical_parity == *run.report.statistical_parity);
  CHECK(*recomputed.burden_ratio == *run.report.burden_ratio);
  for (int g : {0, 1})
    CHECK(*recomputed.burden_by_group.at(g) == *run.report.burden_by_group.at(g));
}

TEST_CASE("plot re-rendered from artifacts is byte-identical") {
  testutil::TempDir tmp;
  const RunArtifacts run = run_experiment(preset_config(DataSource::preset_da, tmp.file("da")));

  const SchemaFile sf = load_schema(run.dataset_schema);
  const Dataset ds = load_csv(run.dataset_csv, sf.schema, sf.favorable_label_raw);
  const ModelFile mf = load_model(run.model_file);
  std::vector<Counterfactual> cfs;
  for (DumpRecord& rec : read_dump(run.counterfactual_dump)) cfs.push_back(rec.counterfactual);

  const std::string replot = tmp.file("replot.svg");
  REQUIRE(emit_plot(ds, mf.model, cfs, replot));
  CHECK(testutil::read_file(replot) == testutil::read_file(run.plot_file));
}

TEST_CASE("plot contents cover points, crosses, connectors, and the boundary") {
  testutil::TempDir tmp;
  const RunArtifacts run = run_experiment(preset_config(DataSource::preset_da, tmp.file("da")));
  const std::string svg = testutil::read_file(run.plot_file);

  std::size_t crosses = 0, links = 0;
  for (std::size_t pos = svg.find("cf-mark"); pos != std::string::npos;
       pos = svg.find("cf-mark", pos + 1))
    ++crosses;
  for (std::size_t pos = svg.find("cf-link"); pos != std::string::npos;
       pos = svg.find("cf-link", pos + 1))
    ++links;
  CHECK(crosses == 40 + 1);  // one per counterfactual plus the legend sample
  CHECK(links == 40);
  CHECK(svg.find("class=\"boundary\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("<polygon") != std::string::npos);  // triangle markers
  CHECK(svg.find("<rect") != std::string::npos);     // square markers
}

TEST_CASE("plot without counterfactuals still shows points and boundary") {
  const Dataset ds = generate(preset_da(), 5);
  LinearModel model;
  model.weights = {1.0, -1.0};
  model.bias = 0.0;
  testutil::TempDir tmp;
  const std::string path = tmp.file("empty_cf.svg");
  REQUIRE(emit_plot(ds, model, {}, path));
  const std::string svg = testutil::read_file(path);
  CHECK(svg.find("class=\"boundary\"") != std::string::npos);
  std::size_t crosses = 0;
  for (std::size_t pos = svg.find("cf-mark"); pos != std::string::npos;
       pos = svg.find("cf-mark", pos + 1))
    ++crosses;
  CHECK(crosses == 1);  // the legend sample only
  CHECK(svg.find("cf-link") == std::string::npos);
  CHECK(svg.find("<polygon") != std::string::npos);
}

TEST_CASE("plot is skipped for high-dimensional data") {
  const SchemaFile sf = load_schema(testutil::data_file("taiwan_fixture.schema"));
  const Dataset ds =
      load_csv(testutil::data_file("taiwan_fixture.csv"), sf.schema, sf.favorable_label_raw);
  LinearModel model;
  model.weights.assign(19, 0.1);
  model.bias = 0.0;
  testutil::TempDir tmp;
  const std::string path = tmp.file("no_plot.svg");
  CHECK_FALSE(emit_plot(ds, model, {}, path));
  CHECK_FALSE(fs::exists(path));
}

TEST_CASE("failures name the stage and leave no partial artifacts behind") {
  testutil::TempDir tmp;
  ExperimentConfig cfg;
  cfg.source = DataSource::csv;
  cfg.csv_path = tmp.file("missing.csv");
  cfg.schema_path = tmp.file("missing.schema");
  cfg.output_dir = tmp.file("out");
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("stage data"),
                       std::runtime_error);
  CHECK_FALSE(fs::exists(tmp.file("out/fairness_report.json")));
}

TEST_CASE("config digest is stable and content-sensitive") {
  ExperimentConfig a, b;
  CHECK(fnv1a_digest(a.to_json().dump()) == fnv1a_digest(b.to_json().dump()));
  b.seed = 7777;
  CHECK(fnv1a_digest(a.to_json().dump()) != fnv1a_digest(b.to_json().dump()));
}
