#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fedsae {

using Rng = std::mt19937_64;

// Purposes for keyed random streams. Each (seed, purpose, a, b) tuple names an
// independent stream, so a client's draws never depend on which other clients
// were simulated first.
enum class StreamPurpose : std::uint64_t {
  kSyntheticGlobal = 1,
  kSyntheticClient = 2,
  kPartition = 3,
  kProfile = 4,
  kCapacity = 5,
  kSelection = 6,
  kLocalTraining = 7,
  kSplit = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, StreamPurpose purpose,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t part : {static_cast<std::uint64_t>(purpose), a, b}) {
    h = splitmix64(h ^ splitmix64(part));
  }
  return h;
}

inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose,
                       std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(stream_key(seed, purpose, a, b));
}

// Normal draw that tolerates a zero standard deviation.
inline double normal_draw(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

}  // namespace fedsae
