#include "cfaudit/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "cfaudit/rng.hpp"
#include "cfaudit/synthgen.hpp"

namespace fs = std::filesystem;

namespace cfaudit {

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::uint64_t stage_seed(std::uint64_t master, const std::string& stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : stage) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

namespace {

std::string source_name(DataSource source) {
  switch (source) {
    case DataSource::preset_da: return "preset_da";
    case DataSource::preset_db: return "preset_db";
    case DataSource::csv: return "csv";
  }
  return "unknown";
}

DataSource source_from_name(const std::string& name) {
  if (name == "preset_da") return DataSource::preset_da;
  if (name == "preset_db") return DataSource::preset_db;
  if (name == "csv") return DataSource::csv;
  throw std::invalid_argument("unknown data source '" + name + "'");
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json ga_doc = {{"population_size", ga.population_size},
                           {"retained_after_selection", ga.retained_after_selection},
                           {"retained_for_next_generation", ga.retained_for_next_generation},
                           {"generations", ga.generations},
                           {"mutation_probability", ga.mutation_probability},
                           {"crossover_probability", ga.crossover_probability},
                           {"metric", metric_name(ga.metric)}};
  nlohmann::json ranges = nlohmann::json::array();
  for (const FeatureRange& r : ga.feature_ranges) ranges.push_back({r.min, r.max});
  ga_doc["feature_ranges"] = ranges;

  nlohmann::json doc;
  doc["source"] = source_name(source);
  doc["csv_path"] = csv_path;
  doc["schema_path"] = schema_path;
  doc["sensitive_column"] = sensitive_column;
  doc["sample_size"] = sample_size ? nlohmann::json(*sample_size) : nlohmann::json(nullptr);
  doc["seed"] = seed;
  doc["train"] = {{"learning_rate", train.learning_rate},
                  {"iterations", train.iterations},
                  {"random_init", train.random_init},
                  {"init_scale", train.init_scale},
                  {"batch_size", train.batch_size}};
  doc["ga"] = ga_doc;
  doc["ga_profile"] = ga_profile;
  doc["disparate_impact_rule"] =
      di_rule == DisparateImpactRule::two_sided ? "two_sided" : "one_sided";
  doc["output_dir"] = output_dir;
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  cfg.source = source_from_name(doc.value("source", "preset_da"));
  cfg.csv_path = doc.value("csv_path", "");
  cfg.schema_path = doc.value("schema_path", "");
  cfg.sensitive_column = doc.value("sensitive_column", "");
  if (doc.contains("sample_size") && !doc.at("sample_size").is_null())
    cfg.sample_size = doc.at("sample_size").get<std::size_t>();
  cfg.seed = doc.value("seed", std::uint64_t{42});

  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
    cfg.train.iterations = t.value("iterations", cfg.train.iterations);
    cfg.train.random_init = t.value("random_init", cfg.train.random_init);
    cfg.train.init_scale = t.value("init_scale", cfg.train.init_scale);
    cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
  }

  cfg.ga_profile = doc.value("ga_profile", "desk");
  if (cfg.ga_profile == "desk") cfg.ga = GaConfig::desk_profile();
  else if (cfg.ga_profile == "paper") cfg.ga = GaConfig::paper_profile();
  else throw std::invalid_argument("unknown ga_profile '" + cfg.ga_profile + "'");
  if (doc.contains("ga")) {
    const auto& g = doc.at("ga");
    cfg.ga.population_size = g.value("population_size", cfg.ga.population_size);
    cfg.ga.retained_after_selection =
        g.value("retained_after_selection", cfg.ga.retained_after_selection);
    cfg.ga.retained_for_next_generation =
        g.value("retained_for_next_generation", cfg.ga.retained_for_next_generation);
    cfg.ga.generations = g.value("generations", cfg.ga.generations);
    cfg.ga.mutation_probability = g.value("mutation_probability", cfg.ga.mutation_probability);
    cfg.ga.crossover_probability = g.value("crossover_probability", cfg.ga.crossover_probability);
    if (g.contains("metric")) cfg.ga.metric = metric_from_name(g.at("metric").get<std::string>());
    if (g.contains("feature_ranges")) {
      cfg.ga.feature_ranges.clear();
      for (const auto& pair : g.at("feature_ranges"))
        cfg.ga.feature_ranges.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
  }

  const std::string rule = doc.value("disparate_impact_rule", "two_sided");
  if (rule == "two_sided") cfg.di_rule = DisparateImpactRule::two_sided;
  else if (rule == "one_sided") cfg.di_rule = DisparateImpactRule::one_sided;
  else throw std::invalid_argument("unknown disparate_impact_rule '" + rule + "'");

  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  return cfg;
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        sink_[stage] = elapsed(start);
      } else {
        auto result = fn();
        sink_[stage] = elapsed(start);
        return result;
      }
    } catch (const std::exception& e) {
      sink_[stage] = elapsed(start);
      throw std::runtime_error("stage " + stage + ": " + e.what());
    }
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::map<std::string, double>& sink_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& config) {
  RunArtifacts artifacts;
  StageTimer timer(artifacts.stage_seconds);
  std::vector<fs::path> written;

  try {
    Dataset dataset = timer.run("data", [&] {
      switch (config.source) {
        case DataSource::preset_da:
          return generate(preset_da(), stage_seed(config.seed, "data"));
        case DataSource::preset_db:
          return generate(preset_db(), stage_seed(config.seed, "data"));
        case DataSource::csv: {
          const SchemaFile sf = load_schema(config.schema_path);
          Dataset loaded = load_csv(config.csv_path, sf.schema, sf.favorable_label_raw);
          if (!config.sensitive_column.empty())
            loaded = loaded.with_sensitive(config.sensitive_column);
          return loaded;
        }
      }
      throw std::logic_error("unreachable data source");
    });

    std::size_t removed = 0;
    dataset = timer.run("clean", [&] {
      CleanResult result = clean(dataset);
      removed = result.removed_rows;
      return std::move(result.dataset);
    });

    if (config.sample_size) {
      dataset = timer.run("sample", [&] {
        const std::size_t n = std::min(*config.sample_size, dataset.size());
        return sample(dataset, n, stage_seed(config.seed, "sample"));
      });
    }

    const SplitResult parts = split(dataset);
    TrainConfig train_config = config.train;
    train_config.seed = stage_seed(config.seed, "train");
    LinearModel model = timer.run("train", [&] {
      LinearModel m = train(parts.features, parts.labels, train_config);
      m.feature_names = dataset.schema().legitimate_names();
      return m;
    });
    artifacts.accuracy = accuracy(model, parts.features, parts.labels);

    GaConfig ga_config = config.ga;
    ga_config.seed = stage_seed(config.seed, "ga");
    if (ga_config.feature_ranges.empty()) ga_config.feature_ranges = ranges_from(parts.features);
    const std::vector<Counterfactual> counterfactuals = timer.run("counterfactuals", [&] {
      return generate_all(model, parts.features, /*target_class=*/0, ga_config);
    });

    artifacts.report = timer.run("report", [&] {
      FairnessConfig fc{config.di_rule};
      FairnessReport report = build_report(model, dataset, counterfactuals, fc);
      report.metric = ga_config.metric;
      report.provenance.seed = config.seed;
      report.provenance.data_seed = stage_seed(config.seed, "data");
      report.provenance.train_seed = train_config.seed;
      report.provenance.ga_seed = ga_config.seed;
      report.provenance.source = config.source == DataSource::csv ? config.csv_path
                                                                  : source_name(config.source);
      report.provenance.ga_profile = config.ga_profile;
      // Digest covers the result-determining parameters; where the artifacts
      // land cannot change what they contain.
      nlohmann::json digest_doc = config.to_json();
      digest_doc.erase("output_dir");
      report.provenance.config_digest = fnv1a_digest(digest_doc.dump());
      return report;
    });

    timer.run("artifacts", [&] {
      fs::create_directories(config.output_dir);
      const fs::path dir(config.output_dir);
      auto emit = [&](const fs::path& name) {
        written.push_back(dir / name);
        return (dir / name).string();
      };

      artifacts.dataset_csv = emit("dataset.csv");
      write_csv(dataset, artifacts.dataset_csv);
      artifacts.dataset_schema = emit("dataset.schema");
      save_schema({dataset.schema(), dataset.favorable_label_raw()}, artifacts.dataset_schema);
      artifacts.model_file = emit("model.json");
      save_model(model, train_config, artifacts.model_file);
      artifacts.counterfactual_dump = emit("counterfactuals.jsonl");
      write_dump(counterfactuals, parts.features, artifacts.counterfactual_dump);

      nlohmann::json report_doc = artifacts.report.to_json();
      report_doc["accuracy"] = artifacts.accuracy;
      artifacts.report_file = emit("fairness_report.json");
      write_text(artifacts.report_file, report_doc.dump(2) + "\n");

      if (dataset.schema().legitimate_count() == 2) {
        artifacts.plot_file = emit("plot.svg");
        emit_plot(dataset, model, counterfactuals, artifacts.plot_file);
      } else {
        std::cerr << "plot skipped: dataset has " << dataset.schema().legitimate_count()
                  << " legitimate features, plotting needs exactly 2\n";
      }

      nlohmann::json meta;
      meta["removed_rows"] = removed;
      meta["rows_used"] = dataset.size();
      meta["counterfactuals"] = counterfactuals.size();
      std::size_t invalid = 0;
      for (const Counterfactual& cf : counterfactuals)
        if (!cf.valid) ++invalid;
      meta["invalid_counterfactuals"] = invalid;
      meta["stage_seconds"] = artifacts.stage_seconds;
      artifacts.meta_file = emit("run_meta.json");
      write_text(artifacts.meta_file, meta.dump(2) + "\n");
    });
  } catch (...) {
    std::error_code ec;
    for (const fs::path& path : written) fs::remove(path, ec);
    throw;
  }
  return artifacts;
}

// ---------------------------------------------------------------------------
// SVG plot

namespace {

struct Extent {
  double xmin, xmax, ymin, ymax;
};

struct Mapper {
  Extent extent;
  double px, py, pw, ph;  // plot rectangle in SVG coordinates

  double sx(double x) const { return px + (x - extent.xmin) / (extent.xmax - extent.xmin) * pw; }
  double sy(double y) const { return py + ph - (y - extent.ymin) / (extent.ymax - extent.ymin) * ph; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void svg_marker(std::string& svg, const Mapper& map, double x, double y, int s,
                const std::string& color) {
  const double cx = map.sx(x);
  const double cy = map.sy(y);
  if (s == 0) {  // triangle pointing down
    svg += "<polygon points=\"" + num(cx - 4) + "," + num(cy - 3.5) + " " + num(cx + 4) + "," +
           num(cy - 3.5) + " " + num(cx) + "," + num(cy + 4.5) + "\" fill=\"" + color + "\"/>\n";
  } else {  // square
    svg += "<rect x=\"" + num(cx - 3.5) + "\" y=\"" + num(cy - 3.5) +
           "\" width=\"7\" height=\"7\" fill=\"" + color + "\"/>\n";
  }
}

void svg_cross(std::string& svg, double cx, double cy, const std::string& color) {
  svg += "<path class=\"cf-mark\" d=\"M" + num(cx - 4) + " " + num(cy - 4) + " L" + num(cx + 4) +
         " " + num(cy + 4) + " M" + num(cx - 4) + " " + num(cy + 4) + " L" + num(cx + 4) + " " +
         num(cy - 4) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
}

}  // namespace

bool emit_plot(const Dataset& dataset, const LinearModel& model,
               const std::vector<Counterfactual>& counterfactuals, const std::string& path) {
  if (dataset.schema().legitimate_count() != 2) {
    std::cerr << "plot skipped: dataset has " << dataset.schema().legitimate_count()
              << " legitimate features, plotting needs exactly 2\n";
    return false;
  }
  if (model.feature_count() != 2)
    throw std::invalid_argument("emit_plot: model is not 2-dimensional");

  const std::vector<DataPoint> points = dataset.points();

  Extent ext{0.0, 1.0, 0.0, 1.0};
  bool first = true;
  auto grow = [&](double x, double y) {
    if (first) {
      ext = {x, x, y, y};
      first = false;
      return;
    }
    ext.xmin = std::min(ext.xmin, x);
    ext.xmax = std::max(ext.xmax, x);
    ext.ymin = std::min(ext.ymin, y);
    ext.ymax = std::max(ext.ymax, y);
  };
  for (const DataPoint& p : points) grow(p.x[0], p.x[1]);
  for (const Counterfactual& cf : counterfactuals)
    if (cf.valid) grow(cf.c_star[0], cf.c_star[1]);
  const double pad_x = std::max(0.5, (ext.xmax - ext.xmin) * 0.05);
  const double pad_y = std::max(0.5, (ext.ymax - ext.ymin) * 0.05);
  ext.xmin -= pad_x;
  ext.xmax += pad_x;
  ext.ymin -= pad_y;
  ext.ymax += pad_y;

  const Mapper map{ext, 60.0, 20.0, 440.0, 460.0};

  const std::string color_y0 = "#d55e00";  // unfavorable
  const std::string color_y1 = "#0072b2";  // favorable
  const std::string color_cf = "#444444";

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"540\" "
         "viewBox=\"0 0 700 540\">\n";
  svg += "<rect width=\"700\" height=\"540\" fill=\"white\"/>\n";
  svg += "<rect x=\"60\" y=\"20\" width=\"440\" height=\"460\" fill=\"none\" stroke=\"#888\"/>\n";

  // Dotted connectors first so markers draw on top.
  for (const Counterfactual& cf : counterfactuals) {
    if (!cf.valid) continue;
    const DataPoint& origin = points[cf.origin_index];
    svg += "<line class=\"cf-link\" x1=\"" + num(map.sx(origin.x[0])) + "\" y1=\"" +
           num(map.sy(origin.x[1])) + "\" x2=\"" + num(map.sx(cf.c_star[0])) + "\" y2=\"" +
           num(map.sy(cf.c_star[1])) + "\" stroke=\"#999\" stroke-width=\"1\" "
           "stroke-dasharray=\"2,3\"/>\n";
  }

  // Decision boundary clipped to the extent rectangle.
  {
    const double w1 = model.weights[0];
    const double w2 = model.weights[1];
    const double b = model.bias;
    std::vector<std::pair<double, double>> hits;
    auto add_hit = [&](double x, double y) {
      for (const auto& h : hits)
        if (std::abs(h.first - x) < 1e-9 && std::abs(h.second - y) < 1e-9) return;
      hits.emplace_back(x, y);
    };
    if (std::abs(w2) > 1e-300) {
      for (double x : {ext.xmin, ext.xmax}) {
        const double y = -(b + w1 * x) / w2;
        if (y >= ext.ymin && y <= ext.ymax) add_hit(x, y);
      }
    }
    if (std::abs(w1) > 1e-300) {
      for (double y : {ext.ymin, ext.ymax}) {
        const double x = -(b + w2 * y) / w1;
        if (x >= ext.xmin && x <= ext.xmax) add_hit(x, y);
      }
    }
    if (hits.size() >= 2) {
      svg += "<line class=\"boundary\" x1=\"" + num(map.sx(hits[0].first)) + "\" y1=\"" +
             num(map.sy(hits[0].second)) + "\" x2=\"" + num(map.sx(hits[1].first)) + "\" y2=\"" +
             num(map.sy(hits[1].second)) + "\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";
    }
  }

  for (const DataPoint& p : points)
    svg_marker(svg, map, p.x[0], p.x[1], p.s, p.y == 1 ? color_y1 : color_y0);

  for (const Counterfactual& cf : counterfactuals)
    if (cf.valid) svg_cross(svg, map.sx(cf.c_star[0]), map.sy(cf.c_star[1]), color_cf);

  // Axis labels and extent ticks.
  const std::vector<std::string> names = dataset.schema().legitimate_names();
  svg += "<text x=\"280\" y=\"515\" font-size=\"13\" text-anchor=\"middle\">" + names[0] +
         "</text>\n";
  svg += "<text x=\"20\" y=\"250\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 20 250)\">" + names[1] + "</text>\n";
  svg += "<text x=\"60\" y=\"495\" font-size=\"10\">" + num(ext.xmin) + "</text>\n";
  svg += "<text x=\"500\" y=\"495\" font-size=\"10\" text-anchor=\"end\">" + num(ext.xmax) +
         "</text>\n";
  svg += "<text x=\"55\" y=\"480\" font-size=\"10\" text-anchor=\"end\">" + num(ext.ymin) +
         "</text>\n";
  svg += "<text x=\"55\" y=\"30\" font-size=\"10\" text-anchor=\"end\">" + num(ext.ymax) +
         "</text>\n";

  // Legend.
  double ly = 40.0;
  auto legend_row = [&](const std::string& marker, const std::string& text) {
    svg += marker;
    svg += "<text x=\"545\" y=\"" + num(ly + 4) + "\" font-size=\"12\">" + text + "</text>\n";
    ly += 22.0;
  };
  auto tri = [&](const std::string& color) {
    return "<polygon points=\"" + num(526.0) + "," + num(ly - 3.5) + " " + num(534.0) + "," +
           num(ly - 3.5) + " " + num(530.0) + "," + num(ly + 4.5) + "\" fill=\"" + color +
           "\"/>\n";
  };
  auto sq = [&](const std::string& color) {
    return "<rect x=\"526.5\" y=\"" + num(ly - 3.5) + "\" width=\"7\" height=\"7\" fill=\"" +
           color + "\"/>\n";
  };
  legend_row(tri(color_y0), "s=0, y=0");
  legend_row(tri(color_y1), "s=0, y=1");
  legend_row(sq(color_y0), "s=1, y=0");
  legend_row(sq(color_y1), "s=1, y=1");
  {
    std::string cross;
    svg_cross(cross, 530.0, ly, color_cf);
    legend_row(cross, "counterfactual");
  }
  legend_row("<line x1=\"522\" y1=\"" + num(ly) + "\" x2=\"538\" y2=\"" + num(ly) +
                 "\" stroke=\"#000\" stroke-width=\"1.5\"/>\n",
             "decision boundary");

  svg += "</svg>\n";
  write_text(path, svg);
  return true;
}

}  // namespace cfaudit
