#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pots/beacon.hpp"
#include "pots/hashcash.hpp"
#include "pots/u256.hpp"

namespace pots {

/// One participant's solved puzzle within a team chain. stage_index is
/// 1-based; input_digest is the previous stage's output (or the root digest
/// for stage 1).
struct StageProof {
    std::uint16_t stage_index = 1;
    NodeId participant = 0;
    u256 input_digest = 0;
    std::uint64_t nonce = 0;
    u256 output_digest = 0;
    std::uint64_t attempts = 1;

    bool operator==(const StageProof&) const = default;
};

/// A team's completed block candidate: N linked stage proofs over a root
/// derived from the round beacon and the payload digest.
struct ChainLink {
    std::uint64_t round = 0;
    std::uint32_t group_id = 0;
    u256 payload_digest = 0;
    u256 root_digest = 0;
    std::vector<StageProof> stages;

    bool operator==(const ChainLink&) const = default;
};

/// Stage-1 input: SHA-256(beacon value 32 BE || payload digest 32 BE).
u256 chain_root(const u256& beacon_value, const u256& payload_digest);

/// Bit-exact stage preimage (54 bytes): round 8 BE || group 4 BE ||
/// stage 2 BE || participant 8 BE || input digest 32 BE. The search nonce is
/// appended by the hashcash engine.
std::vector<std::uint8_t> stage_preimage(std::uint64_t round,
                                         std::uint32_t group_id,
                                         std::uint16_t stage_index,
                                         NodeId participant,
                                         const u256& input_digest);

/// Cyclic backup rule: the member after the failed stage's participant
/// re-runs it (a 1-member team backs itself up).
NodeId backup_participant(const std::vector<NodeId>& team,
                          std::uint16_t failed_stage_index);

/// Simulated per-run fault: returns true when the run's result must be
/// discarded. Drawn before the search; the attempts are still spent.
using FailureOracle = std::function<bool(std::uint16_t stage_index, NodeId participant)>;

/// One search run on a team's timeline; [start_tick, end_tick) with one
/// attempt per tick, so runs of one team never overlap.
struct StageRun {
    std::uint16_t stage_index = 1;
    NodeId node = 0;
    std::uint64_t start_tick = 0;
    std::uint64_t end_tick = 0;
    bool succeeded = false;
};

struct ChainContext {
    std::uint64_t round = 0;
    std::uint32_t group_id = 0;
    u256 payload_digest = 0;
    u256 root_digest = 0;
};

struct TeamChainResult {
    std::optional<ChainLink> link;  // nullopt => team failed
    std::vector<StageRun> runs;
    std::uint64_t duration_ticks = 0;

    bool failed() const { return !link.has_value(); }
};

/// Runs the N stages sequentially. Every stage participant searches from
/// nonce 0 over its stage preimage; the output feeds the next stage. A stage
/// failure (exhausted search or fault) triggers one cyclic backup re-run;
/// a second failure of the same stage fails the team.
TeamChainResult run_team_chain(const ChainContext& ctx,
                               const std::vector<NodeId>& team,
                               const Target& t_stage,
                               std::uint64_t budget_per_stage,
                               const FailureOracle& failure = {});

/// Attempts charged per node from a team timeline, counting only ticks
/// strictly before stop_tick.
std::map<NodeId, std::uint64_t> attempts_from_runs(const std::vector<StageRun>& runs,
                                                   std::uint64_t stop_tick);

enum class ChainFault {
    None,
    BadStructure,      // shape, round/group or stage numbering mismatch
    BadLinkage,        // root derivation or stage input chaining broken
    BadDigest,         // stored digest does not recompute from the preimage
    MissedTarget,      // a stage digest is not below the stage target
    WrongParticipant,  // neither the assigned member nor its cyclic backup
    BadAttempts,       // attempts != nonce + 1 (searches start at nonce 0)
};

const char* chain_fault_name(ChainFault fault);

struct ChainCheck {
    ChainFault fault = ChainFault::None;
    std::uint16_t stage_index = 0;  // 0 = not stage-specific

    explicit operator bool() const { return fault == ChainFault::None; }
};

/// Full recomputation of a chain link against the round's assignment, stage
/// target and beacon value.
ChainCheck validate_chainlink(const ChainLink& link,
                              const TeamAssignment& assignment,
                              const Target& t_stage,
                              const u256& beacon_value);

struct Completion {
    std::uint32_t group_id = 0;
    std::uint64_t completion_tick = 0;
    u256 final_digest = 0;
};

/// Minimum completion tick; ties broken by smaller final digest, then
/// smaller group id. Throws Error(NoCompletion) on an empty list.
std::uint32_t identify_winner(const std::vector<Completion>& completions);

/// Cumulative rewards in integer micro-units.
struct RewardLedger {
    std::map<NodeId, std::uint64_t> cumulative;
    std::uint64_t reward_per_round = 0;
};

/// Splits reward_microunits equally over the team; the first
/// (reward mod team size) members absorb the remainder so the total
/// increment is exact.
void distribute_rewards(RewardLedger& ledger,
                        const std::vector<NodeId>& winning_team,
                        std::uint64_t reward_microunits);

// ---------------------------------------------------------------------------
// Round outcomes, shared by the PoTS and PoW arms.

enum class Protocol { PoW, PoTS };
enum class Mode { Idealized, Stochastic };

const char* protocol_name(Protocol p);
const char* mode_name(Mode m);

/// A PoW winner's solution. The miner preimage is round 8 BE || miner 8 BE
/// with the nonce appended by the search.
struct PowProof {
    std::uint64_t round = 0;
    NodeId miner = 0;
    std::uint64_t nonce = 0;
    u256 output_digest = 0;

    bool operator==(const PowProof&) const = default;
};

struct RoundResult {
    std::uint64_t round = 0;
    Protocol protocol = Protocol::PoTS;
    bool completed = false;
    std::uint32_t winner_group = 0;  // PoTS
    NodeId winner_node = 0;          // PoW
    std::uint64_t duration_ticks = 0;
    std::map<NodeId, std::uint64_t> attempts_by_node;
    std::optional<ChainLink> winning_link;  // PoTS
    std::optional<PowProof> winning_proof;  // PoW
    /// Per-team busy timelines (PoTS only); simulation bookkeeping, not
    /// serialized.
    std::vector<std::vector<StageRun>> team_runs;
};

}  // namespace pots
