#pragma once

#include <cstdint>

#include "fedsae/random.hpp"

namespace fedsae {

/// Per-client capacity distribution: affordable epochs ~ Normal(mu, sigma^2).
struct CapacityProfile {
  double mu = 7.5;
  double sigma = 2.0;
};

/// mu ~ U[5, 10), then sigma ~ U[mu/4, mu/2).
CapacityProfile sample_profile(Rng& rng);

/// One round's affordable workload, clamped below at zero.
double draw_capacity(const CapacityProfile& profile, Rng& rng);

// Keyed forms: a client's profile depends only on (seed, client), and its
// round-t capacity only on (seed, client, round).
CapacityProfile client_profile(std::uint64_t seed, int client);
double client_capacity(const CapacityProfile& profile, std::uint64_t seed, int client, int round);

}  // namespace fedsae
