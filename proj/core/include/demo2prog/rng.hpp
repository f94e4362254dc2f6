#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace demo2prog {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-stage seed derivation: every pipeline stage draws from its own stream
// so stages can be re-run independently with reproducible results.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed,
                                    std::string_view stage) {
  return splitmix64(global_seed ^ fnv1a64(stage));
}

inline Rng make_rng(std::uint64_t global_seed, std::string_view stage) {
  return Rng(derive_seed(global_seed, stage));
}

}  // namespace demo2prog
