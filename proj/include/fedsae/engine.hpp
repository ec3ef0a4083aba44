#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedsae/dataset.hpp"
#include "fedsae/hetero.hpp"
#include "fedsae/model.hpp"
#include "fedsae/predictor.hpp"
#include "fedsae/selector.hpp"

namespace fedsae {

enum class Algorithm { kFedAvg, kFedSaeIra, kFedSaeFassa };

std::string to_string(Algorithm algorithm);
/// Accepts "fedavg", "fedsae_ira", "fedsae_fassa" (also "ira" / "fassa").
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kFedSaeIra;
  int rounds = 200;
  int clients_per_round = 10;
  double fixed_epochs = 15.0;  // FedAvg only
  TrainingConfig training;
  PredictorParams predictor;
  SelectionParams selection;
  std::uint64_t seed = 0;
  int num_classes = 0;  // 0: one more than the largest label in the shards
  int threads = 1;

  void validate(int num_clients) const;
};

struct MetricsRow {
  int round = 0;
  double test_accuracy = 0;
  double train_loss = 0;
  double dropout_rate = 0;
  double mean_assigned_workload = 0;
  double mean_completed_workload = 0;
};

/// What one selected client did in one round.
struct RoundReport {
  int client_id = 0;
  long num_samples = 0;
  double assigned_epochs = 0;
  double affordable = 0;
  double completed_epochs = 0;
  Completion completion = Completion::kDropped;
  bool uploaded = false;
  double mean_loss = 0;  // on its training set, at the broadcast model
  long iterations = 0;
  std::optional<ModelWeights> weights;  // present iff uploaded
};

struct RoundResult {
  MetricsRow metrics;
  std::vector<RoundReport> reports;
};

struct ClientState {
  CapacityProfile profile;
  TaskPair pair;
};

/// n_k / sum(n) over the uploading reports, in report order.
std::vector<double> aggregation_weights(std::span<const RoundReport> reports);

/// Sample-weighted mean of uploaded weights; `current` when nothing was uploaded.
ModelWeights aggregate(std::span<const RoundReport> reports, const ModelWeights& current);

/// Sample-weighted loss and top-1 accuracy over every client's test split.
LossAccuracy<double> evaluate_global(const ModelWeights& w, std::span<const ClientShard> shards);

/// One federated training run. Holds a view of `shards`, which must outlive it.
class Federation {
 public:
  using CapacitySource = std::function<double(int client, int round)>;

  Federation(ExperimentConfig config, std::span<const ClientShard> shards);

  /// Executes the next round (rounds are numbered from 1).
  RoundResult run_round();

  int completed_rounds() const { return round_; }
  const ModelWeights& global_weights() const { return global_; }
  void set_global_weights(ModelWeights w);
  const std::vector<ClientState>& clients() const { return clients_; }
  const SelectionState& selection() const { return selection_; }
  const ExperimentConfig& config() const { return config_; }

  /// Replaces the Gaussian capacity draws (used to force scenarios in tests).
  void set_capacity_source(CapacitySource source) { capacity_ = std::move(source); }

 private:
  RoundReport simulate_client(int client, int round) const;

  ExperimentConfig config_;
  std::span<const ClientShard> shards_;
  std::vector<ClientState> clients_;
  SelectionState selection_;
  ModelWeights global_;
  CapacitySource capacity_;
  int round_ = 0;
};

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config,
                                       std::span<const ClientShard> shards);

}  // namespace fedsae
