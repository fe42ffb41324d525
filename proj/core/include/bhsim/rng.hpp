#pragma once

#include <cstdint>
#include <random>

namespace bhsim {

using Rng = std::mt19937_64;

/// One independent stream per consumer of randomness.
enum class RngStream : std::uint32_t {
  placement = 1,
  flows = 2,
  adversary = 3,
  warmup = 4,
  mobility_base = 1000,  // + node index
};

inline Rng make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, 0x6268u};
  return Rng(seq);
}

inline Rng make_rng(std::uint64_t seed, RngStream stream, std::uint32_t offset = 0) {
  return make_rng(seed, static_cast<std::uint32_t>(stream) + offset);
}

}  // namespace bhsim
