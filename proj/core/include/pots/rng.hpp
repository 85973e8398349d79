#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pots/sha256.hpp"

namespace pots {

/// Counter-mode deterministic randomness: block_i = SHA-256(seed 8 BE ||
/// label || i 8 BE). Disjoint labels give independent streams.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label);

    /// The i-th raw keystream block.
    Digest block(std::uint64_t i) const;

    /// Next 8 keystream bytes as a big-endian integer.
    std::uint64_t next_u64();

    /// Uniform draw in [0, bound); rejection sampled, so no modulo bias.
    std::uint64_t uniform(std::uint64_t bound);

    /// True with probability p, using a 53-bit uniform draw.
    bool bernoulli(double p);

private:
    std::vector<std::uint8_t> prefix_;  // seed || label
    std::uint64_t next_block_ = 0;
    Digest current_{};
    std::size_t offset_ = 32;  // exhausted; refill on first use
};

RngStream derive_rng_stream(std::uint64_t seed, std::string_view label);

}  // namespace pots
