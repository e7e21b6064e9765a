#pragma once

#include <cstdint>
#include <random>

namespace qrc {

using Rng = std::mt19937_64;

/// Independent, reproducible random streams derived from one experiment seed.
enum class RngStream : std::uint32_t {
    quantum_init = 1,
    classical_init = 2,
    head_init = 3,
    noise_model = 4,
    shots = 5,
};

inline Rng make_rng(std::uint64_t seed, RngStream stream)
{
    std::seed_seq seq{
      static_cast<std::uint32_t>(seed & 0xffffffffu),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream),
      0x51c0ffeeu};
    return Rng(seq);
}

} // namespace qrc
