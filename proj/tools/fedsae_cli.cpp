// Experiment runner: `fedsae run` and `fedsae sweep-al`.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fedsae/config.hpp"
#include "fedsae/errors.hpp"
#include "fedsae/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::string config_path;
  std::string algorithm;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string al_rounds;
  std::optional<double> target_accuracy;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value config file or a run manifest");
  cmd->add_option("--algorithm", o.algorithm, "fedavg, fedsae_ira, fedsae_fassa (comma list for run)");
  cmd->add_option("--rounds", o.rounds, "communication rounds");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--al-rounds", o.al_rounds, "AL rounds (run: one value; sweep-al: comma list)");
  cmd->add_option("--target-accuracy", o.target_accuracy, "accuracy target for rounds-to-target");
}

fedsae::RunConfig resolve(const Overrides& o, bool sweep) {
  fedsae::RunConfig config =
      o.config_path.empty() ? fedsae::RunConfig{} : fedsae::load_config_file(o.config_path);
  fedsae::KeyValues kv = fedsae::to_key_values(config);
  if (!o.algorithm.empty()) kv[sweep ? "sweep_algorithm" : "algorithms"] = o.algorithm;
  if (o.rounds) kv["rounds"] = std::to_string(*o.rounds);
  if (o.seed) kv["seed"] = std::to_string(*o.seed);
  if (!o.out_dir.empty()) kv["out_dir"] = o.out_dir;
  if (!o.al_rounds.empty()) {
    if (sweep) {
      kv["sweep_al_rounds"] = o.al_rounds;
    } else {
      const std::vector<int> values = fedsae::parse_int_list(o.al_rounds);
      if (values.size() != 1) throw fedsae::ConfigError("run takes a single --al-rounds value");
      kv["al_rounds"] = std::to_string(values.front());
    }
  }
  if (o.target_accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *o.target_accuracy);
    kv["target_accuracy"] = buf;
  }
  return fedsae::config_from_key_values(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning simulator with self-adaptive workloads"};
  app.require_subcommand(1);
  Overrides run_opts;
  Overrides sweep_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run each configured algorithm, write metrics CSVs");
  CLI::App* sweep_cmd = app.add_subcommand("sweep-al", "rounds-to-target for several AL round counts");
  add_common(run_cmd, run_opts);
  add_common(sweep_cmd, sweep_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      const fedsae::RunOutputs out = fedsae::run(resolve(run_opts, false));
      for (const auto& path : out.metrics_files) std::cout << "wrote " << path.string() << "\n";
      std::cout << "wrote " << out.manifest.string() << "\n";
    } else {
      const fedsae::RunConfig config = resolve(sweep_opts, true);
      const fedsae::RunOutputs out = fedsae::run_sweep(config);
      std::cout << "wrote " << (std::filesystem::path(config.out_dir) / "sweep_al.csv").string() << "\n";
      std::cout << "wrote " << out.manifest.string() << "\n";
    }
  } catch (const fedsae::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fedsae::InfeasiblePartition& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
