#include "fedsae/hetero.hpp"

#include <algorithm>
#include <cmath>

namespace fedsae {

CapacityProfile sample_profile(Rng& rng) {
  CapacityProfile p;
  // generate_canonical may round up to the open bound; pull it back inside.
  p.mu = std::min(std::uniform_real_distribution<double>(5.0, 10.0)(rng), std::nextafter(10.0, 0.0));
  const double hi = p.mu / 2.0;
  p.sigma = std::min(std::uniform_real_distribution<double>(p.mu / 4.0, hi)(rng), std::nextafter(hi, 0.0));
  return p;
}

double draw_capacity(const CapacityProfile& profile, Rng& rng) {
  return std::max(0.0, normal_draw(rng, profile.mu, profile.sigma));
}

CapacityProfile client_profile(std::uint64_t seed, int client) {
  Rng rng = make_stream(seed, StreamPurpose::kProfile, static_cast<std::uint64_t>(client));
  return sample_profile(rng);
}

double client_capacity(const CapacityProfile& profile, std::uint64_t seed, int client, int round) {
  Rng rng = make_stream(seed, StreamPurpose::kCapacity, static_cast<std::uint64_t>(client),
                        static_cast<std::uint64_t>(round));
  return draw_capacity(profile, rng);
}

}  // namespace fedsae
