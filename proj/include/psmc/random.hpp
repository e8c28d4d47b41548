#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace psmc {

// splitmix64 step, used to derive well-separated per-stream seeds from a
// master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  return splitmix64(s);
}

inline std::vector<double> normal_vector(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

}  // namespace psmc
