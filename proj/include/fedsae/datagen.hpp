#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedsae/dataset.hpp"
#include "fedsae/model.hpp"

namespace fedsae {

/// Parameters of the Synthetic(alpha, beta) federated dataset.
struct SyntheticSpec {
  double alpha = 1.0;  // variance of the per-client model mean
  double beta = 1.0;   // variance of the per-client feature mean
  int num_clients = 100;
  int dim = 60;
  int num_classes = 10;
  long total_samples = 75349;
  double power_law_exponent = 1.0;
  std::uint64_t seed = 0;
};

/// Hidden parameters used to label one client's synthetic data.
struct SyntheticClientParams {
  double model_mean = 0;    // u_k
  double feature_mean = 0;  // B_k
  Eigen::VectorXd feature_center;  // v_k
  ModelWeights labeler;            // W_k, b_k
};

struct SyntheticDataset {
  std::vector<ClientShard> shards;
  std::vector<SyntheticClientParams> params;
};

/// Sizes proportional to (k+1)^-exponent, scaled to `total` by largest
/// remainder, each at least 2 (or 1 when total < 2 * count). Non-increasing.
std::vector<long> power_law_sizes(long total, int count, double exponent);

/// Splits `n` into (train, test) with 20% test and at least one test sample when n >= 2.
std::pair<long, long> train_test_sizes(long n);

SyntheticDataset generate_synthetic_with_params(const SyntheticSpec& spec);
std::vector<ClientShard> generate_synthetic(const SyntheticSpec& spec);

struct PartitionOptions {
  int classes_per_client = 2;
  double power_law_exponent = 1.0;
  std::uint64_t seed = 0;
  int num_classes = 0;  // 0: infer as max label + 1
};

/// Routes every sample to exactly one client. Each client sees at most
/// `classes_per_client` distinct labels; sizes follow power_law_sizes.
std::vector<ClientShard> partition_label_skew(const std::vector<Sample>& samples, int num_clients,
                                              const PartitionOptions& options);

/// Parses a headered CSV whose `label_column` holds integer class ids and
/// every other column a numeric feature.
std::vector<Sample> read_labeled_csv(const std::string& path, const std::string& label_column);

std::vector<ClientShard> ingest_csv(const std::string& path, const std::string& label_column,
                                    int num_clients, const PartitionOptions& options);

}  // namespace fedsae
