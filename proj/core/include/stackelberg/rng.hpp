#pragma once

#include <cstdint>
#include <random>

namespace stackelberg {

// Independent sub-streams of one run seed. Each consumer draws from its own
// stream so that, e.g., changing the horizon never perturbs the dataset.
enum class Stream : std::uint64_t {
  kData = 1,
  kOracleData = 2,
  kSphere = 3,
  kDiagnostics = 4,
};

using Rng = std::mt19937_64;

// splitmix64 finaliser
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(mix_seed(mix_seed(seed) ^ static_cast<std::uint64_t>(stream)));
}

}  // namespace stackelberg
