#include "fedsae/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "fedsae/errors.hpp"

namespace fedsae {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kFedAvg:
      return "fedavg";
    case Algorithm::kFedSaeIra:
      return "fedsae_ira";
    case Algorithm::kFedSaeFassa:
      return "fedsae_fassa";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "fedavg") return Algorithm::kFedAvg;
  if (name == "fedsae_ira" || name == "ira") return Algorithm::kFedSaeIra;
  if (name == "fedsae_fassa" || name == "fassa") return Algorithm::kFedSaeFassa;
  throw ConfigError("unknown algorithm '" + name + "'");
}

void ExperimentConfig::validate(int num_clients) const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (clients_per_round < 1 || clients_per_round > num_clients) {
    throw ConfigError("clients_per_round must be in [1, " + std::to_string(num_clients) + "]");
  }
  if (algorithm == Algorithm::kFedAvg && !(fixed_epochs > 0.0)) {
    throw ConfigError("fixed_epochs must be positive for fedavg");
  }
  if (!(training.learning_rate >= 0.0) || !std::isfinite(training.learning_rate)) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (training.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  predictor.validate();
}

std::vector<double> aggregation_weights(std::span<const RoundReport> reports) {
  long total = 0;
  for (const RoundReport& r : reports) {
    if (r.uploaded) total += r.num_samples;
  }
  std::vector<double> weights;
  for (const RoundReport& r : reports) {
    if (r.uploaded) weights.push_back(static_cast<double>(r.num_samples) / static_cast<double>(total));
  }
  return weights;
}

ModelWeights aggregate(std::span<const RoundReport> reports, const ModelWeights& current) {
  // Running weighted mean: identical inputs reproduce themselves bit for bit.
  std::optional<ModelWeights> mean;
  long seen = 0;
  for (const RoundReport& r : reports) {
    if (!r.uploaded) continue;
    if (!r.weights) throw std::logic_error("aggregate: uploaded report without weights");
    seen += r.num_samples;
    if (!mean) {
      mean = *r.weights;
      continue;
    }
    const double step = static_cast<double>(r.num_samples) / static_cast<double>(seen);
    mean->weight += step * (r.weights->weight - mean->weight);
    mean->bias += step * (r.weights->bias - mean->bias);
  }
  return mean ? *mean : current;
}

LossAccuracy<double> evaluate_global(const ModelWeights& w, std::span<const ClientShard> shards) {
  double loss_sum = 0;
  double correct = 0;
  double count = 0;
  for (const ClientShard& s : shards) {
    if (s.test.empty()) continue;
    const auto n = static_cast<double>(s.test.size());
    const LossAccuracy<double> part = loss_and_accuracy(w, s.test);
    loss_sum += part.loss * n;
    correct += part.accuracy * n;
    count += n;
  }
  if (count == 0) throw DataError("evaluate_global: no test samples");
  return {loss_sum / count, correct / count};
}

namespace {

int infer_num_classes(std::span<const ClientShard> shards) {
  int top = 0;
  for (const ClientShard& s : shards) {
    if (s.train.size() > 0) top = std::max(top, s.train.labels.maxCoeff());
    if (s.test.size() > 0) top = std::max(top, s.test.labels.maxCoeff());
  }
  return std::max(2, top + 1);
}

[[noreturn]] void invariant_failure(int round, const std::string& what) {
  std::ostringstream msg;
  msg << "round " << round << ": invariant violated: " << what;
  throw std::logic_error(msg.str());
}

}  // namespace

Federation::Federation(ExperimentConfig config, std::span<const ClientShard> shards)
    : config_(std::move(config)), shards_(shards) {
  if (shards_.empty()) throw ConfigError("federation: no clients");
  for (std::size_t k = 0; k < shards_.size(); ++k) {
    if (shards_[k].train.empty()) {
      throw DataError("federation: client " + std::to_string(k) + " has no training data");
    }
    if (shards_[k].train.dim() != shards_.front().train.dim()) {
      throw DimensionMismatch("federation: clients disagree on feature dimension");
    }
  }
  const int n = static_cast<int>(shards_.size());
  config_.validate(n);
  const int classes = config_.num_classes > 0 ? config_.num_classes : infer_num_classes(shards_);
  global_ = ModelWeights::zeros(classes, shards_.front().train.dim());
  selection_ = SelectionState(n, config_.clients_per_round, config_.selection);
  clients_.reserve(shards_.size());
  for (int k = 0; k < n; ++k) {
    clients_.push_back({client_profile(config_.seed, k), config_.predictor.initial_pair()});
  }
}

void Federation::set_global_weights(ModelWeights w) {
  if (w.num_classes() != global_.num_classes() || w.dim() != global_.dim()) {
    throw DimensionMismatch("set_global_weights: shape differs from the model");
  }
  global_ = std::move(w);
}

RoundReport Federation::simulate_client(int client, int round) const {
  const ClientShard& shard = shards_[static_cast<std::size_t>(client)];
  const ClientState& state = clients_[static_cast<std::size_t>(client)];

  RoundReport r;
  r.client_id = client;
  r.num_samples = static_cast<long>(shard.num_train());
  r.affordable = capacity_ ? capacity_(client, round)
                           : client_capacity(state.profile, config_.seed, client, round);

  if (config_.algorithm == Algorithm::kFedAvg) {
    r.assigned_epochs = config_.fixed_epochs;
    r.uploaded = r.affordable >= config_.fixed_epochs;
    r.completion = r.uploaded ? Completion::kFull : Completion::kDropped;
    r.completed_epochs = r.uploaded ? config_.fixed_epochs : 0.0;
  } else {
    const RoundOutcome outcome = execute_assignment(state.pair, r.affordable);
    r.assigned_epochs = state.pair.high;
    r.uploaded = outcome.uploaded;
    r.completion = outcome.completion;
    r.completed_epochs = outcome.completed_epochs;
  }

  if (r.uploaded) {
    Rng rng = make_stream(config_.seed, StreamPurpose::kLocalTraining,
                          static_cast<std::uint64_t>(client), static_cast<std::uint64_t>(round));
    LocalTrainResult<double> trained =
        local_train(global_, shard.train, r.completed_epochs, config_.training, rng);
    r.mean_loss = trained.initial_loss;
    r.iterations = trained.iterations;
    r.weights = std::move(trained.weights);
  } else {
    r.mean_loss = loss_and_accuracy(global_, shard.train).loss;
  }
  return r;
}

RoundResult Federation::run_round() {
  const int t = ++round_;
  Rng select_rng = make_stream(config_.seed, StreamPurpose::kSelection, static_cast<std::uint64_t>(t));
  const std::vector<int> chosen = select(selection_, t, select_rng);

  RoundResult result;
  result.reports.resize(chosen.size());
  if (config_.threads > 1 && chosen.size() > 1) {
    std::vector<std::future<void>> jobs;
    const auto workers = static_cast<std::size_t>(config_.threads);
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < chosen.size(); i += workers) {
          result.reports[i] = simulate_client(chosen[i], t);
        }
      }));
    }
    for (auto& job : jobs) job.get();
  } else {
    for (std::size_t i = 0; i < chosen.size(); ++i) result.reports[i] = simulate_client(chosen[i], t);
  }

  // Single synchronization point: aggregate, then advance per-client state.
  const std::vector<double> mix = aggregation_weights(result.reports);
  if (!mix.empty()) {
    double sum = 0;
    for (double m : mix) sum += m;
    if (std::abs(sum - 1.0) > 1e-12) invariant_failure(t, "aggregation weights do not sum to 1");
  }
  global_ = aggregate(result.reports, global_);

  std::vector<ValueReport> values;
  for (const RoundReport& r : result.reports) {
    ClientState& state = clients_[static_cast<std::size_t>(r.client_id)];
    const RoundOutcome outcome{r.completion, r.completed_epochs, r.uploaded, r.affordable};
    if (r.completed_epochs > r.affordable) invariant_failure(t, "client completed more than it could afford");
    switch (config_.algorithm) {
      case Algorithm::kFedAvg:
        break;
      case Algorithm::kFedSaeIra:
        state.pair = ira_update(state.pair, outcome, config_.predictor);
        break;
      case Algorithm::kFedSaeFassa:
        state.pair.theta = fassa_update_theta(state.pair.theta, r.affordable, config_.predictor.smoothness);
        state.pair = fassa_update(state.pair, outcome, config_.predictor);
        break;
    }
    if (!(state.pair.low > 0.0 && state.pair.low <= state.pair.high)) {
      invariant_failure(t, "task pair out of order for client " + std::to_string(r.client_id));
    }
    if (r.uploaded || !config_.selection.values_from_uploaders_only) {
      values.push_back({r.client_id, r.num_samples, r.mean_loss});
    }
  }
  update_values(selection_, values);

  MetricsRow& m = result.metrics;
  m.round = t;
  const LossAccuracy<double> eval = evaluate_global(global_, shards_);
  m.test_accuracy = eval.accuracy;
  double loss_weighted = 0;
  double samples = 0;
  int dropped = 0;
  for (const RoundReport& r : result.reports) {
    loss_weighted += r.mean_loss * static_cast<double>(r.num_samples);
    samples += static_cast<double>(r.num_samples);
    if (!r.uploaded) ++dropped;
    m.mean_assigned_workload += r.assigned_epochs;
    m.mean_completed_workload += r.completed_epochs;
  }
  const auto k = static_cast<double>(result.reports.size());
  m.train_loss = loss_weighted / samples;
  m.dropout_rate = static_cast<double>(dropped) / k;
  m.mean_assigned_workload /= k;
  m.mean_completed_workload /= k;
  if (!(m.test_accuracy >= 0.0 && m.test_accuracy <= 1.0) || !(m.dropout_rate >= 0.0 && m.dropout_rate <= 1.0)) {
    invariant_failure(t, "metric outside [0, 1]");
  }
  return result;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config,
                                       std::span<const ClientShard> shards) {
  Federation fed(config, shards);
  std::vector<MetricsRow> rows;
  rows.reserve(static_cast<std::size_t>(config.rounds));
  for (int t = 0; t < config.rounds; ++t) rows.push_back(fed.run_round().metrics);
  return rows;
}

}  // namespace fedsae
