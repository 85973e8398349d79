#include "pots/protocol.hpp"

#include <algorithm>

#include "pots/errors.hpp"
#include "pots/sha256.hpp"

namespace pots {

u256 chain_root(const u256& beacon_value, const u256& payload_digest) {
    std::vector<std::uint8_t> pre;
    pre.reserve(64);
    put_u256_be(pre, beacon_value);
    put_u256_be(pre, payload_digest);
    return digest(pre);
}

std::vector<std::uint8_t> stage_preimage(std::uint64_t round,
                                         std::uint32_t group_id,
                                         std::uint16_t stage_index,
                                         NodeId participant,
                                         const u256& input_digest) {
    std::vector<std::uint8_t> pre;
    pre.reserve(54);
    put_u64_be(pre, round);
    put_u32_be(pre, group_id);
    put_u16_be(pre, stage_index);
    put_u64_be(pre, participant);
    put_u256_be(pre, input_digest);
    return pre;
}

NodeId backup_participant(const std::vector<NodeId>& team,
                          std::uint16_t failed_stage_index) {
    // primary for stage s sits at index s-1; backup is the next member,
    // wrapping around
    return team[failed_stage_index % team.size()];
}

TeamChainResult run_team_chain(const ChainContext& ctx,
                               const std::vector<NodeId>& team,
                               const Target& t_stage,
                               std::uint64_t budget_per_stage,
                               const FailureOracle& failure) {
    if (team.empty()) {
        throw Error(Errc::InvalidGroupSize, "run_team_chain: empty team");
    }
    TeamChainResult result;
    const auto group_size = static_cast<std::uint16_t>(team.size());

    ChainLink link;
    link.round = ctx.round;
    link.group_id = ctx.group_id;
    link.payload_digest = ctx.payload_digest;
    link.root_digest = ctx.root_digest;
    link.stages.reserve(group_size);

    std::uint64_t clock = 0;
    const auto run_stage = [&](std::uint16_t stage, NodeId who,
                               const u256& input) -> SearchResult {
        const bool faulty = failure && failure(stage, who);
        const auto pre = stage_preimage(ctx.round, ctx.group_id, stage, who, input);
        SearchResult res = search(pre, t_stage, 0, budget_per_stage);
        const bool ok = res.found() && !faulty;
        result.runs.push_back({stage, who, clock, clock + res.attempts, ok});
        clock += res.attempts;
        if (!ok) {
            res.nonce.reset();
        }
        return res;
    };

    u256 input = ctx.root_digest;
    for (std::uint16_t stage = 1; stage <= group_size; ++stage) {
        NodeId who = team[stage - 1];
        SearchResult res = run_stage(stage, who, input);
        if (!res.found()) {
            who = backup_participant(team, stage);
            res = run_stage(stage, who, input);
            if (!res.found()) {
                result.duration_ticks = clock;
                return result;  // TeamFailed
            }
        }
        link.stages.push_back(
            {stage, who, input, *res.nonce, res.output_digest, res.attempts});
        input = res.output_digest;
    }

    result.link = std::move(link);
    result.duration_ticks = clock;
    return result;
}

std::map<NodeId, std::uint64_t> attempts_from_runs(const std::vector<StageRun>& runs,
                                                   std::uint64_t stop_tick) {
    std::map<NodeId, std::uint64_t> attempts;
    for (const auto& run : runs) {
        if (run.start_tick >= stop_tick) {
            continue;
        }
        attempts[run.node] += std::min(run.end_tick, stop_tick) - run.start_tick;
    }
    return attempts;
}

const char* chain_fault_name(ChainFault fault) {
    switch (fault) {
        case ChainFault::None: return "None";
        case ChainFault::BadStructure: return "BadStructure";
        case ChainFault::BadLinkage: return "BadLinkage";
        case ChainFault::BadDigest: return "BadDigest";
        case ChainFault::MissedTarget: return "MissedTarget";
        case ChainFault::WrongParticipant: return "WrongParticipant";
        case ChainFault::BadAttempts: return "BadAttempts";
    }
    return "Unknown";
}

ChainCheck validate_chainlink(const ChainLink& link,
                              const TeamAssignment& assignment,
                              const Target& t_stage,
                              const u256& beacon_value) {
    if (link.round != assignment.round ||
        link.group_id >= assignment.groups.size()) {
        return {ChainFault::BadStructure, 0};
    }
    const auto& team = assignment.groups[link.group_id];
    if (link.stages.size() != team.size() ||
        team.size() != assignment.group_size) {
        return {ChainFault::BadStructure, 0};
    }
    if (chain_root(beacon_value, link.payload_digest) != link.root_digest) {
        return {ChainFault::BadLinkage, 0};
    }

    u256 expected_input = link.root_digest;
    for (std::size_t i = 0; i < link.stages.size(); ++i) {
        const auto& proof = link.stages[i];
        const auto stage = static_cast<std::uint16_t>(i + 1);
        if (proof.stage_index != stage) {
            return {ChainFault::BadStructure, stage};
        }
        if (proof.input_digest != expected_input) {
            return {ChainFault::BadLinkage, stage};
        }
        if (proof.participant != team[i] &&
            proof.participant != backup_participant(team, stage)) {
            return {ChainFault::WrongParticipant, stage};
        }
        auto pre = stage_preimage(link.round, link.group_id, stage,
                                  proof.participant, proof.input_digest);
        put_u64_be(pre, proof.nonce);
        if (digest(pre) != proof.output_digest) {
            return {ChainFault::BadDigest, stage};
        }
        if (!meets_target(proof.output_digest, t_stage)) {
            return {ChainFault::MissedTarget, stage};
        }
        if (proof.attempts != proof.nonce + 1) {
            return {ChainFault::BadAttempts, stage};
        }
        expected_input = proof.output_digest;
    }
    return {ChainFault::None, 0};
}

std::uint32_t identify_winner(const std::vector<Completion>& completions) {
    if (completions.empty()) {
        throw Error(Errc::NoCompletion, "identify_winner: no completions");
    }
    const auto* best = &completions.front();
    for (const auto& c : completions) {
        const auto key = std::tie(c.completion_tick, c.final_digest, c.group_id);
        const auto best_key =
            std::tie(best->completion_tick, best->final_digest, best->group_id);
        if (key < best_key) {
            best = &c;
        }
    }
    return best->group_id;
}

void distribute_rewards(RewardLedger& ledger,
                        const std::vector<NodeId>& winning_team,
                        std::uint64_t reward_microunits) {
    if (winning_team.empty()) {
        throw Error(Errc::InvalidGroupSize, "distribute_rewards: empty team");
    }
    const auto n = winning_team.size();
    const std::uint64_t share = reward_microunits / n;
    const std::uint64_t remainder = reward_microunits % n;
    for (std::size_t i = 0; i < n; ++i) {
        ledger.cumulative[winning_team[i]] += share + (i < remainder ? 1 : 0);
    }
}

const char* protocol_name(Protocol p) {
    return p == Protocol::PoW ? "pow" : "pots";
}

const char* mode_name(Mode m) {
    return m == Mode::Idealized ? "idealized" : "stochastic";
}

}  // namespace pots
