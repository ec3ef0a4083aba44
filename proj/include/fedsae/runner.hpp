#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fedsae/config.hpp"

namespace fedsae {

inline constexpr const char* kMetricsHeader =
    "round,test_accuracy,train_loss,dropout_rate,mean_assigned,mean_completed";

std::vector<ClientShard> load_dataset(const RunConfig& config);

std::string metrics_csv(std::span<const MetricsRow> rows);
void write_text_file(const std::filesystem::path& path, const std::string& text);

struct RunOutputs {
  std::vector<std::filesystem::path> metrics_files;  // one per algorithm, in config order
  std::filesystem::path manifest;
};

/// Runs every configured algorithm on the same dataset and seed, writing
/// metrics_<algorithm>.csv and manifest.json into config.out_dir.
RunOutputs run(const RunConfig& config);

/// First round whose test accuracy reaches `target`, or -1.
int rounds_to_target(std::span<const MetricsRow> rows, double target);

struct SweepRow {
  int al_rounds = 0;
  int rounds_to_target = -1;
  double final_accuracy = 0;
};

/// One run of config.sweep_algorithm per AL-round count over shared shards.
std::vector<SweepRow> sweep_al(const RunConfig& config, std::span<const ClientShard> shards,
                               std::span<const int> al_rounds, double target,
                               std::vector<std::vector<MetricsRow>>* metrics = nullptr);

/// sweep_al plus file output: sweep_al.csv, per-n metrics and sweep_manifest.json.
RunOutputs run_sweep(const RunConfig& config);

}  // namespace fedsae
