#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedsae/datagen.hpp"
#include "fedsae/engine.hpp"

namespace fedsae {

/// Flat `key = value` settings; `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

struct DatasetConfig {
  std::string kind = "synthetic";  // "synthetic" or "csv"
  SyntheticSpec synthetic;
  std::string csv_path;
  std::string label_column = "label";
  int classes_per_client = 2;
};

struct RunConfig {
  DatasetConfig dataset;
  std::vector<Algorithm> algorithms{Algorithm::kFedAvg, Algorithm::kFedSaeIra, Algorithm::kFedSaeFassa};
  ExperimentConfig experiment;  // `algorithm` is overwritten per run
  Algorithm sweep_algorithm = Algorithm::kFedSaeIra;
  std::vector<int> sweep_al_rounds{0, 20, 50, 100, 150, 200};
  std::optional<double> target_accuracy;
  std::string out_dir = "out";
};

KeyValues parse_key_values(const std::string& text);

/// Unknown keys and malformed values raise ConfigError.
RunConfig config_from_key_values(const KeyValues& kv);

/// Every setting, including defaults; feeding it back reproduces the config.
KeyValues to_key_values(const RunConfig& config);

/// Reads either a key-value file or a run manifest (JSON with a "config" object).
RunConfig load_config_file(const std::string& path);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace fedsae
