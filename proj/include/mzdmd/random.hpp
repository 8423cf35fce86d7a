#ifndef MZDMD_RANDOM_HPP
#define MZDMD_RANDOM_HPP

#include <cstdint>
#include <random>

namespace mzdmd {

using Rng = std::mt19937_64;

// Independent stream families derived from one master seed.
enum class StreamDomain : std::uint64_t { measurement = 1, projection = 2, memory = 3, test = 4 };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for sample `index` of a domain. Depends only on (seed, domain,
/// index), so results do not depend on the order samples are processed in.
inline Rng make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  const std::uint64_t key =
      splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain))) + index);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(domain)};
  return Rng(seq);
}

}  // namespace mzdmd

#endif  // MZDMD_RANDOM_HPP
