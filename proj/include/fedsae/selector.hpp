#pragma once

#include <span>
#include <vector>

#include "fedsae/random.hpp"

namespace fedsae {

struct SelectionParams {
  double beta = 0.01;     // scale on training values inside the softmax
  int al_rounds = 0;      // rounds 1..al_rounds use value-weighted selection
  bool values_from_uploaders_only = false;
};

/// Server-side training value per client; starts at zero (uniform selection).
struct SelectionState {
  std::vector<double> values;
  double beta = 0.01;
  int al_rounds = 0;
  int clients_per_round = 10;

  SelectionState() = default;
  SelectionState(int num_clients, int clients_per_round, const SelectionParams& params);

  int num_clients() const { return static_cast<int>(values.size()); }
};

struct ValueReport {
  int client_id = 0;
  long num_samples = 0;
  double mean_loss = 0.0;
};

/// v_k <- sqrt(n_k) * mean loss for each reported client; others keep their value.
void update_values(SelectionState& state, std::span<const ValueReport> reports);

/// softmax(beta * v) over all clients.
std::vector<double> selection_probabilities(const SelectionState& state);

/// Draws clients_per_round distinct ids, returned in ascending order. Rounds
/// t <= al_rounds sample by value without replacement, later rounds uniformly.
std::vector<int> select(const SelectionState& state, int round, Rng& rng);

std::vector<int> select_uniform(int num_clients, int count, Rng& rng);
std::vector<int> select_weighted(std::span<const double> probabilities, int count, Rng& rng);

}  // namespace fedsae
