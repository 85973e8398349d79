#pragma once

#include <cstdint>
#include <vector>

#include "pots/protocol.hpp"
#include "pots/rng.hpp"

namespace pots {

/// Miner-specific preimage prefix (16 bytes): round 8 BE || miner 8 BE.
/// The nonce is appended by the search.
std::vector<std::uint8_t> pow_preimage(std::uint64_t round, NodeId miner);

/// One PoW round over the full miner set.
///
/// Stochastic: lockstep race, one nonce per miner per tick; the round ends
/// at the first tick with a success (ties broken by smaller digest, then
/// smaller id) and every miner is charged its attempts through that tick.
/// Exhausting tick_budget yields an incomplete round.
///
/// Idealized: every miner is charged exactly expected_attempts(t_total); the
/// winner is drawn uniformly via the rng stream and carries a real proof
/// against the maximal (easy) target so validation stays exercised.
RoundResult run_pow_round(std::uint64_t round,
                          const std::vector<NodeId>& miners,
                          const Target& t_total,
                          Mode mode,
                          std::uint64_t tick_budget,
                          RngStream& rng);

/// Recomputes the proof digest and checks it against the target that was in
/// force (the total target in stochastic mode, the easy structural target in
/// idealized mode).
bool verify_pow_proof(const PowProof& proof, const Target& t);

}  // namespace pots
