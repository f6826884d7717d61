#pragma once

#include <cstdint>
#include <random>

namespace bspaa {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream `stream` of a base seed; replicate i of a Monte-Carlo
/// run always sees the same numbers regardless of how replicates are split
/// across threads.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

}  // namespace bspaa
