#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mgdm {

// splitmix64 finalizer; used both as a stream mixer and to seed engines.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed fan-out: a master seed plus a path of stream ids yields
// an independent child seed. Adding a stream never perturbs sibling streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

// Fixed stream ids for the per-module seed split.
namespace stream {
inline constexpr std::uint64_t kMuxLeakage = 0x11;
inline constexpr std::uint64_t kDemuxLeakage = 0x12;
inline constexpr std::uint64_t kIntraGroup = 0x21;
inline constexpr std::uint64_t kInterStatic = 0x22;
inline constexpr std::uint64_t kInterDrift = 0x23;
inline constexpr std::uint64_t kOpticalNoise = 0x31;
inline constexpr std::uint64_t kElectricalNoise = 0x32;
}  // namespace stream

}  // namespace mgdm
