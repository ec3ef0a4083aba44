#include "fedsae/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "fedsae/errors.hpp"

namespace fedsae {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : to_key_values(config)) out[k] = v;
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<ClientShard> load_dataset(const RunConfig& config) {
  const DatasetConfig& ds = config.dataset;
  if (ds.kind == "synthetic") {
    SyntheticSpec spec = ds.synthetic;
    spec.seed = config.experiment.seed;
    return generate_synthetic(spec);
  }
  if (ds.csv_path.empty()) throw ConfigError("dataset = csv requires csv_path");
  PartitionOptions options;
  options.classes_per_client = ds.classes_per_client;
  options.power_law_exponent = ds.synthetic.power_law_exponent;
  options.seed = config.experiment.seed;
  return ingest_csv(ds.csv_path, ds.label_column, ds.synthetic.num_clients, options);
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const MetricsRow& r : rows) {
    out += std::to_string(r.round) + "," + fmt(r.test_accuracy) + "," + fmt(r.train_loss) + "," +
           fmt(r.dropout_rate) + "," + fmt(r.mean_assigned_workload) + "," +
           fmt(r.mean_completed_workload) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("failed to write " + path.string());
}

RunOutputs run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ClientShard> shards = load_dataset(config);
  const std::filesystem::path dir = config.out_dir;

  RunOutputs outputs;
  nlohmann::json files = nlohmann::json::object();
  for (Algorithm algorithm : config.algorithms) {
    ExperimentConfig ex = config.experiment;
    ex.algorithm = algorithm;
    const std::vector<MetricsRow> rows = run_experiment(ex, shards);
    const std::string name = "metrics_" + to_string(algorithm) + ".csv";
    write_text_file(dir / name, metrics_csv(rows));
    outputs.metrics_files.push_back(dir / name);
    files[to_string(algorithm)] = name;
  }

  nlohmann::json manifest = {
      {"command", "run"},
      {"config", config_json(config)},
      {"seed", config.experiment.seed},
      {"out_dir", config.out_dir},
      {"metrics", files},
      {"wall_clock_seconds", seconds_since(start)},
  };
  outputs.manifest = dir / "manifest.json";
  write_text_file(outputs.manifest, manifest.dump(2) + "\n");
  return outputs;
}

int rounds_to_target(std::span<const MetricsRow> rows, double target) {
  for (const MetricsRow& r : rows) {
    if (r.test_accuracy >= target) return r.round;
  }
  return -1;
}

std::vector<SweepRow> sweep_al(const RunConfig& config, std::span<const ClientShard> shards,
                               std::span<const int> al_rounds, double target,
                               std::vector<std::vector<MetricsRow>>* metrics) {
  std::vector<SweepRow> out;
  for (int n : al_rounds) {
    if (n < 0) throw ConfigError("AL round counts must be >= 0");
    ExperimentConfig ex = config.experiment;
    ex.algorithm = config.sweep_algorithm;
    ex.selection.al_rounds = n;
    std::vector<MetricsRow> rows = run_experiment(ex, shards);
    out.push_back({n, rounds_to_target(rows, target), rows.back().test_accuracy});
    if (metrics) metrics->push_back(std::move(rows));
  }
  return out;
}

RunOutputs run_sweep(const RunConfig& config) {
  if (!config.target_accuracy) throw ConfigError("sweep-al needs target_accuracy");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ClientShard> shards = load_dataset(config);
  const std::filesystem::path dir = config.out_dir;

  std::vector<std::vector<MetricsRow>> metrics;
  const std::vector<SweepRow> rows =
      sweep_al(config, shards, config.sweep_al_rounds, *config.target_accuracy, &metrics);

  RunOutputs outputs;
  nlohmann::json files = nlohmann::json::object();
  std::string summary = "al_rounds,rounds_to_target,final_accuracy\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    summary += std::to_string(rows[i].al_rounds) + "," + std::to_string(rows[i].rounds_to_target) +
               "," + fmt(rows[i].final_accuracy) + "\n";
    const std::string name = "metrics_" + to_string(config.sweep_algorithm) + "_al" +
                             std::to_string(rows[i].al_rounds) + ".csv";
    write_text_file(dir / name, metrics_csv(metrics[i]));
    outputs.metrics_files.push_back(dir / name);
    files[std::to_string(rows[i].al_rounds)] = name;
  }
  write_text_file(dir / "sweep_al.csv", summary);

  nlohmann::json manifest = {
      {"command", "sweep-al"},
      {"config", config_json(config)},
      {"seed", config.experiment.seed},
      {"out_dir", config.out_dir},
      {"summary", "sweep_al.csv"},
      {"metrics", files},
      {"wall_clock_seconds", seconds_since(start)},
  };
  outputs.manifest = dir / "sweep_manifest.json";
  write_text_file(outputs.manifest, manifest.dump(2) + "\n");
  return outputs;
}

}  // namespace fedsae
