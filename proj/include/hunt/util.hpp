#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace hunt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One top-level seed fans out to per-stage seeds so stages are independently
// reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& stage) {
  std::uint64_t h = seed;
  for (unsigned char c : stage) h = splitmix64(h ^ c);
  return splitmix64(h);
}

using Rng = std::mt19937_64;

}  // namespace hunt
