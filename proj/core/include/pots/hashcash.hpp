#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "pots/sha256.hpp"
#include "pots/u256.hpp"

namespace pots {

/// Numeric difficulty target. A digest d succeeds iff d < threshold, so the
/// per-attempt success probability is threshold / 2^256.
struct Target {
    u256 threshold = 1;

    bool operator==(const Target&) const = default;
};

/// Strict comparison: d < t.threshold.
bool meets_target(const u256& d, const Target& t);

/// Fast path used by the nonce scan: big-endian byte comparison against the
/// target's byte form (lexicographic order on big-endian bytes is numeric
/// order).
bool meets_target(const Digest& d, const Digest& threshold_be);

struct SearchResult {
    /// Set iff a nonce below the target was found within the budget.
    std::optional<std::uint64_t> nonce;
    u256 output_digest = 0;  // digest of the found nonce; 0 when exhausted
    std::uint64_t attempts = 0;

    bool found() const { return nonce.has_value(); }
};

/// Bounded sequential nonce scan. Tries start_nonce, start_nonce+1, ...,
/// appending each nonce to preimage_prefix as 8 big-endian bytes, and stops
/// at the first digest strictly below the target or after max_attempts
/// evaluations. Exhaustion is a result, not an error.
SearchResult search(std::span<const std::uint8_t> preimage_prefix,
                    const Target& t,
                    std::uint64_t start_nonce,
                    std::uint64_t max_attempts);

/// Per-stage target for a team of N: threshold scaled by N, clamped to
/// 2^256 - 1. N sequential stages then cost one total-target solve in
/// expectation.
Target stage_target(const Target& total, std::uint32_t group_size);

/// Expected attempts for one solve of t: round(2^256 / threshold). Throws
/// Error(InvalidConfig) when the result does not fit in 64 bits.
std::uint64_t expected_attempts(const Target& t);

}  // namespace pots
