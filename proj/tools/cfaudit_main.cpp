#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cfaudit/counterfactual.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/fairness.hpp"
#include "cfaudit/harness.hpp"
#include "cfaudit/synthgen.hpp"

namespace {

using namespace cfaudit;

struct SourceFlags {
  std::string preset;
  std::string csv_path;
  std::string schema_path;
  std::string sensitive;
  std::optional<std::size_t> sample_size;
};

void add_source_flags(CLI::App* cmd, SourceFlags& flags) {
  auto* preset = cmd->add_option("--preset", flags.preset, "synthetic preset (da or db)")
                     ->check(CLI::IsMember({"da", "db"}));
  auto* csv = cmd->add_option("--csv", flags.csv_path, "CSV dataset path");
  cmd->add_option("--schema", flags.schema_path, "schema file for --csv");
  cmd->add_option("--sensitive", flags.sensitive, "sensitive column to audit (CSV sources)");
  cmd->add_option("--sample", flags.sample_size, "sample size (capped at the cleaned dataset)");
  preset->excludes(csv);
  csv->needs(cmd->get_option("--schema"));
}

void apply_source(const SourceFlags& flags, ExperimentConfig& config) {
  if (!flags.preset.empty()) {
    config.source = flags.preset == "da" ? DataSource::preset_da : DataSource::preset_db;
  } else if (!flags.csv_path.empty()) {
    config.source = DataSource::csv;
    config.csv_path = flags.csv_path;
    config.schema_path = flags.schema_path;
  }
  if (!flags.sensitive.empty()) config.sensitive_column = flags.sensitive;
  if (flags.sample_size) config.sample_size = flags.sample_size;
}

Dataset acquire_dataset(const ExperimentConfig& config) {
  Dataset dataset = [&] {
    switch (config.source) {
      case DataSource::preset_da: return generate(preset_da(), stage_seed(config.seed, "data"));
      case DataSource::preset_db: return generate(preset_db(), stage_seed(config.seed, "data"));
      case DataSource::csv: {
        const SchemaFile sf = load_schema(config.schema_path);
        Dataset loaded = load_csv(config.csv_path, sf.schema, sf.favorable_label_raw);
        if (!config.sensitive_column.empty())
          loaded = loaded.with_sensitive(config.sensitive_column);
        return loaded;
      }
    }
    throw std::logic_error("unreachable data source");
  }();
  dataset = clean(dataset).dataset;
  if (config.sample_size) {
    const std::size_t n = std::min(*config.sample_size, dataset.size());
    dataset = sample(dataset, n, stage_seed(config.seed, "sample"));
  }
  return dataset;
}

void print_report(const RunArtifacts& artifacts) {
  const FairnessReport& report = artifacts.report;
  std::printf("accuracy              %.4f\n", artifacts.accuracy);
  for (const auto& [code, rate] : report.acceptance_rate_by_group)
    std::printf("acceptance_rate[s=%d]  %.4f\n", code, rate);
  if (report.statistical_parity)
    std::printf("statistical_parity    %.4f\n", *report.statistical_parity);
  else
    std::printf("statistical_parity    undefined\n");
  if (report.disparate_impact)
    std::printf("disparate_impact      %s\n", *report.disparate_impact ? "yes" : "no");
  for (const auto& [code, value] : report.burden_by_group) {
    if (value)
      std::printf("burden[s=%d]           %.4f\n", code, *value);
    else
      std::printf("burden[s=%d]           undefined\n", code);
  }
  if (report.burden_ratio)
    std::printf("burden_ratio          %.4f\n", *report.burden_ratio);
  else
    std::printf("burden_ratio          undefined\n");
  double total = 0.0;
  for (const auto& [stage, seconds] : artifacts.stage_seconds) total += seconds;
  std::printf("total_seconds         %.3f\n", total);
  std::printf("artifacts             %s\n", artifacts.report_file.c_str());
}

int run_gen(const std::string& preset, std::uint64_t seed, const std::string& out,
            const std::string& schema_out) {
  const SyntheticSpec spec = preset == "da" ? preset_da() : preset_db();
  const Dataset dataset = generate(spec, seed);
  write_csv(dataset, out);
  if (!schema_out.empty())
    save_schema({dataset.schema(), dataset.favorable_label_raw()}, schema_out);
  std::printf("wrote %zu rows to %s\n", dataset.size(), out.c_str());
  return 0;
}

int run_train(const ExperimentConfig& config, const std::string& out) {
  const Dataset dataset = acquire_dataset(config);
  const SplitResult parts = split(dataset);
  TrainConfig train_config = config.train;
  train_config.seed = stage_seed(config.seed, "train");
  LinearModel model = train(parts.features, parts.labels, train_config);
  model.feature_names = dataset.schema().legitimate_names();
  save_model(model, train_config, out);
  std::printf("trained on %zu rows, accuracy %.4f, model saved to %s\n", dataset.size(),
              accuracy(model, parts.features, parts.labels), out.c_str());
  return 0;
}

int run_audit(const ExperimentConfig& config) {
  const RunArtifacts artifacts = run_experiment(config);
  print_report(artifacts);
  return 0;
}

int run_plot(const std::string& data_path, const std::string& schema_path,
             const std::string& model_path, const std::string& dump_path,
             const std::string& out) {
  const SchemaFile sf = load_schema(schema_path);
  const Dataset dataset = load_csv(data_path, sf.schema, sf.favorable_label_raw);
  const ModelFile mf = load_model(model_path);
  std::vector<Counterfactual> counterfactuals;
  for (DumpRecord& rec : read_dump(dump_path)) counterfactuals.push_back(rec.counterfactual);
  if (!emit_plot(dataset, mf.model, counterfactuals, out)) return 1;
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int run_oracle_check(const ExperimentConfig& config, double max_ratio) {
  const Dataset dataset = acquire_dataset(config);
  const SplitResult parts = split(dataset);
  TrainConfig train_config = config.train;
  train_config.seed = stage_seed(config.seed, "train");
  const LinearModel model = train(parts.features, parts.labels, train_config);

  GaConfig ga_config = config.ga;
  ga_config.seed = stage_seed(config.seed, "ga");
  if (ga_config.feature_ranges.empty()) ga_config.feature_ranges = ranges_from(parts.features);
  const std::vector<Counterfactual> found = generate_all(model, parts.features, 0, ga_config);

  std::printf("%8s %14s %14s %8s\n", "index", "ga_dist", "oracle_dist", "ratio");
  double worst = 0.0;
  std::size_t invalid = 0;
  for (const Counterfactual& cf : found) {
    const Counterfactual oracle =
        oracle_projection(model, parts.features[cf.origin_index], cf.origin_index);
    if (!cf.valid || !oracle.valid) {
      ++invalid;
      std::printf("%8zu %14s %14s %8s\n", cf.origin_index, cf.valid ? "-" : "invalid",
                  oracle.valid ? "-" : "invalid", "-");
      continue;
    }
    const double ratio = cf.distance / oracle.distance;
    worst = std::max(worst, ratio);
    std::printf("%8zu %14.6f %14.6f %8.4f\n", cf.origin_index, cf.distance, oracle.distance,
                ratio);
  }
  std::printf("max ratio %.4f over %zu points (%zu invalid)\n", worst, found.size(), invalid);
  if (invalid > 0) return 1;
  if (max_ratio > 0.0 && worst > max_ratio) {
    std::fprintf(stderr, "error: max ratio %.4f exceeds --max-ratio %.4f\n", worst, max_ratio);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfaudit: fairness audits from counterfactual boundary distances"};
  app.set_version_flag("--version", CFAUDIT_VERSION);
  app.require_subcommand(1);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  std::string gen_preset;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  std::string gen_schema_out;
  gen_cmd->add_option("--preset", gen_preset, "synthetic preset (da or db)")
      ->required()
      ->check(CLI::IsMember({"da", "db"}));
  gen_cmd->add_option("--seed", gen_seed, "generation seed");
  gen_cmd->add_option("--out", gen_out, "output CSV path")->required();
  gen_cmd->add_option("--schema-out", gen_schema_out, "also write the matching schema file");

  // shared flags for the pipeline subcommands
  auto* train_cmd = app.add_subcommand("train", "fit a logistic regression and save it");
  auto* audit_cmd = app.add_subcommand("audit", "run the full fairness audit pipeline");
  auto* oracle_cmd = app.add_subcommand(
      "oracle-check", "compare genetic-search distances against the analytic projection");

  SourceFlags train_src, audit_src, oracle_src;
  add_source_flags(train_cmd, train_src);
  add_source_flags(audit_cmd, audit_src);
  add_source_flags(oracle_cmd, oracle_src);

  struct PipelineFlags {
    std::optional<std::uint64_t> seed;
    std::optional<double> learning_rate;
    std::optional<int> iterations;
    std::string ga_profile;
    std::optional<std::size_t> population;
    std::optional<std::size_t> retained;
    std::optional<std::size_t> elite;
    std::optional<std::size_t> generations;
    std::optional<double> pm, pc;
    std::string metric;
    std::string di_rule;
  };
  auto add_pipeline_flags = [](CLI::App* cmd, PipelineFlags& f, bool with_ga) {
    cmd->add_option("--seed", f.seed, "master seed for the whole run");
    cmd->add_option("--lr", f.learning_rate, "training learning rate");
    cmd->add_option("--iterations", f.iterations, "training iterations");
    if (with_ga) {
      cmd->add_option("--ga-profile", f.ga_profile, "desk or paper")
          ->check(CLI::IsMember({"desk", "paper"}));
      cmd->add_option("--population", f.population, "GA population size");
      cmd->add_option("--retained", f.retained, "GA candidates retained after selection");
      cmd->add_option("--elite", f.elite, "GA candidates carried to the next generation");
      cmd->add_option("--generations", f.generations, "GA generations");
      cmd->add_option("--pm", f.pm, "mutation probability");
      cmd->add_option("--pc", f.pc, "crossover probability");
      cmd->add_option("--metric", f.metric, "euclidean or manhattan")
          ->check(CLI::IsMember({"euclidean", "manhattan"}));
      cmd->add_option("--di-rule", f.di_rule, "two-sided or one-sided 80% rule")
          ->check(CLI::IsMember({"two-sided", "one-sided"}));
    }
  };

  PipelineFlags train_flags, audit_flags, oracle_flags;
  add_pipeline_flags(train_cmd, train_flags, false);
  add_pipeline_flags(audit_cmd, audit_flags, true);
  add_pipeline_flags(oracle_cmd, oracle_flags, true);

  std::string train_out = "model.json";
  train_cmd->add_option("--out", train_out, "model output path");

  std::string audit_config_path;
  std::string audit_out;
  audit_cmd->add_option("--config", audit_config_path, "experiment config JSON");
  audit_cmd->add_option("--out", audit_out, "output directory for run artifacts");

  double oracle_max_ratio = 0.0;
  oracle_cmd->add_option("--max-ratio", oracle_max_ratio,
                         "fail when any GA/oracle distance ratio exceeds this");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "re-render the scatter plot from run artifacts");
  std::string plot_data, plot_schema, plot_model, plot_cf, plot_out;
  plot_cmd->add_option("--data", plot_data, "dataset CSV (audit artifact)")->required();
  plot_cmd->add_option("--schema", plot_schema, "schema file (audit artifact)")->required();
  plot_cmd->add_option("--model", plot_model, "model JSON (audit artifact)")->required();
  plot_cmd->add_option("--cf", plot_cf, "counterfactual dump (audit artifact)")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto build_config = [&](const SourceFlags& src, const PipelineFlags& flags,
                          const std::string& config_path) {
    ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
      nlohmann::json doc;
      in >> doc;
      config = ExperimentConfig::from_json(doc);
    }
    apply_source(src, config);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.learning_rate) config.train.learning_rate = *flags.learning_rate;
    if (flags.iterations) config.train.iterations = *flags.iterations;
    if (!flags.ga_profile.empty()) {
      config.ga_profile = flags.ga_profile;
      config.ga = flags.ga_profile == "paper" ? GaConfig::paper_profile()
                                              : GaConfig::desk_profile();
    }
    if (flags.population) config.ga.population_size = *flags.population;
    if (flags.retained) config.ga.retained_after_selection = *flags.retained;
    if (flags.elite) config.ga.retained_for_next_generation = *flags.elite;
    if (flags.generations) config.ga.generations = *flags.generations;
    if (flags.pm) config.ga.mutation_probability = *flags.pm;
    if (flags.pc) config.ga.crossover_probability = *flags.pc;
    if (!flags.metric.empty()) config.ga.metric = metric_from_name(flags.metric);
    if (!flags.di_rule.empty())
      config.di_rule = flags.di_rule == "one-sided" ? DisparateImpactRule::one_sided
                                                    : DisparateImpactRule::two_sided;
    return config;
  };

  try {
    if (gen_cmd->parsed()) return run_gen(gen_preset, gen_seed, gen_out, gen_schema_out);
    if (train_cmd->parsed())
      return run_train(build_config(train_src, train_flags, ""), train_out);
    if (audit_cmd->parsed()) {
      ExperimentConfig config = build_config(audit_src, audit_flags, audit_config_path);
      if (!audit_out.empty()) config.output_dir = audit_out;
      if (const char* env_dir = std::getenv("CFAUDIT_OUT_DIR"))
        config.output_dir = env_dir;  // output-directory override only
      return run_audit(config);
    }
    if (oracle_cmd->parsed())
      return run_oracle_check(build_config(oracle_src, oracle_flags, ""), oracle_max_ratio);
    if (plot_cmd->parsed())
      return run_plot(plot_data, plot_schema, plot_model, plot_cf, plot_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
