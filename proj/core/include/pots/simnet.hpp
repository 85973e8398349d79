#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pots/beacon.hpp"
#include "pots/hashcash.hpp"
#include "pots/pow.hpp"
#include "pots/protocol.hpp"

namespace pots {

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint32_t n = 1;           // total nodes
    std::uint32_t group_size = 1;  // N, participants per team
    std::uint64_t rounds = 1;
    Target total_target{};
    Mode mode = Mode::Idealized;
    std::uint64_t latency_ticks = 0;
    double failure_prob = 0.0;
    std::uint64_t reward_microunits = 1'000'000;  // R_W
    std::uint32_t contributor_count = 3;          // k beacon contributors
    std::uint64_t min_participation = 0;
    std::uint64_t tick_budget = 1'000'000;
    u256 genesis = 0;

    bool operator==(const SimConfig&) const = default;

    /// Throws Error(InvalidConfig) on any violated bound. Idealized mode
    /// additionally requires failure_prob = 0, latency_ticks = 0 and an
    /// expected-attempt count that fits 64 bits.
    void validate() const;
};

/// Cumulative hash attempts per node; one attempt is one energy unit.
struct EnergyLedger {
    std::map<NodeId, std::uint64_t> attempts;

    void charge(const std::map<NodeId, std::uint64_t>& by_node);
    std::uint64_t total() const;
};

// Deterministic sim-side derivations (all keyed off the global seed).
Digest node_secret(std::uint64_t seed, NodeId id);
u256 sim_contribution(std::uint64_t seed, NodeId id, std::uint64_t round);
u256 round_payload(std::uint64_t seed, std::uint64_t round);

struct PotsRoundOutput {
    RoundResult result;
    Beacon next_beacon;           // == input beacon when skipped
    TeamAssignment assignment;    // empty when skipped
    bool beacon_advanced = false; // false => eligible set could not convene
};

/// One PoTS round: contributor selection, beacon advance, team formation,
/// the M-team race under cfg.mode, and loser truncation at the winner's
/// completion plus latency_ticks. Rewards and ledgers are applied by the
/// caller from the returned result.
PotsRoundOutput run_round_pots(const SimConfig& cfg,
                               std::uint64_t round,
                               const Beacon& beacon,
                               const std::vector<EligibilityRecord>& records);

/// Everything recorded about one simulated round, both arms.
struct RoundRecord {
    std::uint64_t round = 0;
    bool beacon_advanced = false;
    Beacon beacon;
    TeamAssignment assignment;
    RoundResult pots;
    RoundResult pow;
};

struct ArmSummary {
    std::uint64_t rounds_completed = 0;
    std::uint64_t incomplete_rounds = 0;
    std::uint64_t total_energy = 0;
    double mean_duration_ticks = 0.0;  // over completed rounds
    std::map<NodeId, std::uint64_t> attempts;
    std::map<NodeId, std::uint64_t> rewards;
};

struct ExperimentSummary {
    SimConfig config;
    ArmSummary pow;
    ArmSummary pots;
    double energy_ratio = 0.0;  // PoTS total / PoW total
};

struct ExperimentResult {
    ExperimentSummary summary;
    std::vector<RoundRecord> rounds;
};

/// Runs both arms for cfg.rounds rounds from the same seed with independent
/// per-arm rng streams. Fully deterministic in cfg; incomplete rounds are
/// reported in the summary, never thrown.
ExperimentResult run_experiment(const SimConfig& cfg);

}  // namespace pots
