#include "fedsae/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedsae/errors.hpp"

namespace fedsae {

SelectionState::SelectionState(int num_clients, int clients_per_round, const SelectionParams& params)
    : values(static_cast<std::size_t>(num_clients), 0.0),
      beta(params.beta),
      al_rounds(params.al_rounds),
      clients_per_round(clients_per_round) {
  if (num_clients <= 0) throw ConfigError("selection: need at least one client");
  if (clients_per_round <= 0 || clients_per_round > num_clients) {
    throw ConfigError("selection: clients_per_round must be in [1, num_clients]");
  }
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw ConfigError("selection: beta must be finite and non-negative");
  }
  if (params.al_rounds < 0) throw ConfigError("selection: al_rounds must be >= 0");
}

void update_values(SelectionState& state, std::span<const ValueReport> reports) {
  for (const ValueReport& r : reports) {
    if (r.client_id < 0 || r.client_id >= state.num_clients()) {
      throw Error("update_values: unknown client id " + std::to_string(r.client_id));
    }
    state.values[static_cast<std::size_t>(r.client_id)] =
        std::sqrt(static_cast<double>(r.num_samples)) * r.mean_loss;
  }
}

std::vector<double> selection_probabilities(const SelectionState& state) {
  if (state.values.empty()) throw Error("selection_probabilities: no clients");
  std::vector<double> p(state.values.size());
  const double top = state.beta * *std::max_element(state.values.begin(), state.values.end());
  std::transform(state.values.begin(), state.values.end(), p.begin(),
                 [&](double v) { return std::exp(state.beta * v - top); });
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return p;
}

std::vector<int> select_uniform(int num_clients, int count, Rng& rng) {
  std::vector<int> ids(static_cast<std::size_t>(num_clients));
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, num_clients - 1);
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(pick(rng))]);
  }
  ids.resize(static_cast<std::size_t>(count));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<int> select_weighted(std::span<const double> probabilities, int count, Rng& rng) {
  std::vector<double> mass(probabilities.begin(), probabilities.end());
  std::vector<bool> taken(mass.size(), false);
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  for (int draw = 0; draw < count; ++draw) {
    double total = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      if (!taken[k]) total += mass[k];
    }
    std::size_t pick = mass.size();
    if (total > 0.0) {
      const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double running = 0.0;
      for (std::size_t k = 0; k < mass.size(); ++k) {
        if (taken[k] || mass[k] <= 0.0) continue;
        running += mass[k];
        pick = k;
        if (u < running) break;
      }
    }
    if (pick == mass.size()) {
      // Remaining mass underflowed to zero: take the lowest unchosen id.
      pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    chosen.push_back(static_cast<int>(pick));
    taken[pick] = true;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> select(const SelectionState& state, int round, Rng& rng) {
  if (round <= state.al_rounds) {
    return select_weighted(selection_probabilities(state), state.clients_per_round, rng);
  }
  return select_uniform(state.num_clients(), state.clients_per_round, rng);
}

}  // namespace fedsae
