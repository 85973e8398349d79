#include "pots/simnet.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "pots/errors.hpp"
#include "pots/rng.hpp"
#include "pots/sha256.hpp"

namespace pots {

void SimConfig::validate() const {
    if (n < 1 || group_size < 1 || n < group_size) {
        throw Error(Errc::InvalidConfig, "config: need n >= N >= 1");
    }
    if (group_size > 0xffff) {
        throw Error(Errc::InvalidConfig, "config: N exceeds 65535");
    }
    if (rounds < 1) {
        throw Error(Errc::InvalidConfig, "config: rounds must be >= 1");
    }
    if (!(failure_prob >= 0.0 && failure_prob <= 1.0)) {
        throw Error(Errc::InvalidConfig, "config: failure_prob outside [0,1]");
    }
    if (contributor_count < 1 || contributor_count > n) {
        throw Error(Errc::InvalidConfig,
                    "config: contributor_count outside [1, n]");
    }
    if (tick_budget < 1) {
        throw Error(Errc::InvalidConfig, "config: tick_budget must be >= 1");
    }
    if (total_target.threshold < 1) {
        throw Error(Errc::InvalidConfig, "config: target threshold must be >= 1");
    }
    if (mode == Mode::Idealized) {
        if (failure_prob != 0.0) {
            throw Error(Errc::InvalidConfig,
                        "config: failure_prob requires stochastic mode");
        }
        if (latency_ticks != 0) {
            throw Error(Errc::InvalidConfig,
                        "config: latency_ticks requires stochastic mode");
        }
        expected_attempts(total_target);  // must fit 64 bits
    }
}

void EnergyLedger::charge(const std::map<NodeId, std::uint64_t>& by_node) {
    for (const auto& [id, count] : by_node) {
        attempts[id] += count;
    }
}

std::uint64_t EnergyLedger::total() const {
    std::uint64_t sum = 0;
    for (const auto& [id, count] : attempts) {
        sum += count;
    }
    return sum;
}

Digest node_secret(std::uint64_t seed, NodeId id) {
    std::vector<std::uint8_t> pre;
    put_u64_be(pre, seed);
    const std::string_view tag = "node-secret";
    pre.insert(pre.end(), tag.begin(), tag.end());
    put_u64_be(pre, id);
    return sha256(pre);
}

u256 sim_contribution(std::uint64_t seed, NodeId id, std::uint64_t round) {
    const Digest secret = node_secret(seed, id);
    std::vector<std::uint8_t> pre(secret.begin(), secret.end());
    put_u64_be(pre, round);
    return digest(pre);
}

u256 round_payload(std::uint64_t seed, std::uint64_t round) {
    return u256_from_be(derive_rng_stream(seed, "payload").block(round));
}

namespace {

std::vector<EligibilityRecord> eligible_subset(
    const std::vector<EligibilityRecord>& records,
    std::uint64_t min_participation) {
    std::vector<EligibilityRecord> eligible;
    eligible.reserve(records.size());
    for (const auto& rec : records) {
        if (is_eligible(rec, min_participation)) {
            eligible.push_back(rec);
        }
    }
    return eligible;
}

/// Exact split of one solve's expected attempts over N sequential stages:
/// stage charges differ by at most one unit and sum to the whole.
std::vector<std::uint64_t> split_solve_attempts(std::uint64_t solve_attempts,
                                                std::uint32_t group_size) {
    std::vector<std::uint64_t> charges(group_size, solve_attempts / group_size);
    const std::uint64_t remainder = solve_attempts % group_size;
    for (std::uint64_t i = 0; i < remainder; ++i) {
        charges[i] += 1;
    }
    return charges;
}

void run_pots_idealized(const SimConfig& cfg,
                        std::uint64_t round,
                        const TeamAssignment& assignment,
                        const ChainContext& base_ctx,
                        RoundResult& result) {
    const std::uint64_t solve_attempts = expected_attempts(cfg.total_target);
    const auto charges = split_solve_attempts(solve_attempts, cfg.group_size);

    result.team_runs.reserve(assignment.groups.size());
    for (const auto& team : assignment.groups) {
        std::vector<StageRun> runs;
        runs.reserve(team.size());
        std::uint64_t clock = 0;
        for (std::size_t i = 0; i < team.size(); ++i) {
            result.attempts_by_node[team[i]] += charges[i];
            runs.push_back({static_cast<std::uint16_t>(i + 1), team[i], clock,
                            clock + charges[i], true});
            clock += charges[i];
        }
        result.team_runs.push_back(std::move(runs));
    }

    // all teams tie at one full solve; winner drawn uniformly
    auto rng = derive_rng_stream(cfg.seed,
                                 "arm/pots/round/" + std::to_string(round));
    const auto winner =
        static_cast<std::uint32_t>(rng.uniform(assignment.groups.size()));

    // structural chain against the maximal target, kept honest end to end
    ChainContext ctx = base_ctx;
    ctx.group_id = winner;
    const auto chain = run_team_chain(ctx, assignment.groups[winner],
                                      Target{u256_max()}, 8);
    if (chain.failed()) {
        throw std::logic_error("run_round_pots: easy-target chain failed");
    }
    result.completed = true;
    result.winner_group = winner;
    result.duration_ticks = solve_attempts;
    result.winning_link = chain.link;
}

void run_pots_stochastic(const SimConfig& cfg,
                         std::uint64_t round,
                         const TeamAssignment& assignment,
                         const ChainContext& base_ctx,
                         RoundResult& result) {
    const Target t_stage = stage_target(cfg.total_target, cfg.group_size);
    const std::string round_label = "arm/pots/round/" + std::to_string(round);

    std::vector<TeamChainResult> team_results;
    team_results.reserve(assignment.groups.size());
    std::vector<Completion> completions;
    for (std::uint32_t g = 0; g < assignment.groups.size(); ++g) {
        ChainContext ctx = base_ctx;
        ctx.group_id = g;
        FailureOracle oracle;
        RngStream fail_rng = derive_rng_stream(
            cfg.seed, round_label + "/group/" + std::to_string(g));
        if (cfg.failure_prob > 0.0) {
            oracle = [&fail_rng, p = cfg.failure_prob](std::uint16_t, NodeId) {
                return fail_rng.bernoulli(p);
            };
        }
        auto res = run_team_chain(ctx, assignment.groups[g], t_stage,
                                  cfg.tick_budget, oracle);
        if (!res.failed() && res.duration_ticks <= cfg.tick_budget) {
            completions.push_back(
                {g, res.duration_ticks, res.link->stages.back().output_digest});
        }
        team_results.push_back(std::move(res));
    }

    std::uint64_t stop_tick = cfg.tick_budget;
    if (completions.empty()) {
        result.completed = false;
        result.duration_ticks = cfg.tick_budget;
    } else {
        const auto winner = identify_winner(completions);
        const auto winner_tick =
            std::find_if(completions.begin(), completions.end(),
                         [winner](const Completion& c) {
                             return c.group_id == winner;
                         })
                ->completion_tick;
        stop_tick = winner_tick + cfg.latency_ticks;
        result.completed = true;
        result.winner_group = winner;
        result.duration_ticks = winner_tick;
        result.winning_link = team_results[winner].link;
    }

    for (auto& res : team_results) {
        for (const auto& [id, count] : attempts_from_runs(res.runs, stop_tick)) {
            result.attempts_by_node[id] += count;
        }
        result.team_runs.push_back(std::move(res.runs));
    }
}

}  // namespace

PotsRoundOutput run_round_pots(const SimConfig& cfg,
                               std::uint64_t round,
                               const Beacon& beacon,
                               const std::vector<EligibilityRecord>& records) {
    PotsRoundOutput out;
    out.result.round = round;
    out.result.protocol = Protocol::PoTS;

    const auto eligible = eligible_subset(records, cfg.min_participation);
    if (eligible.size() < cfg.contributor_count ||
        eligible.size() < cfg.group_size) {
        // the network cannot convene: no contributors or not even one team
        out.next_beacon = beacon;
        out.beacon_advanced = false;
        out.result.completed = false;
        return out;
    }

    const auto contributors =
        select_contributors(beacon.value, eligible, cfg.contributor_count);
    std::vector<std::pair<NodeId, u256>> contributions;
    contributions.reserve(contributors.size());
    for (NodeId id : contributors) {
        contributions.emplace_back(id, sim_contribution(cfg.seed, id, round));
    }
    out.next_beacon = advance_beacon(beacon, contributions, eligible,
                                     cfg.contributor_count);
    out.beacon_advanced = true;

    std::vector<NodeId> eligible_ids;
    eligible_ids.reserve(eligible.size());
    for (const auto& rec : eligible) {
        eligible_ids.push_back(rec.node);
    }
    out.assignment =
        form_teams(out.next_beacon.value, eligible_ids, cfg.group_size, round);

    ChainContext ctx;
    ctx.round = round;
    ctx.payload_digest = round_payload(cfg.seed, round);
    ctx.root_digest = chain_root(out.next_beacon.value, ctx.payload_digest);

    if (cfg.mode == Mode::Idealized) {
        run_pots_idealized(cfg, round, out.assignment, ctx, out.result);
    } else {
        run_pots_stochastic(cfg, round, out.assignment, ctx, out.result);
    }
    return out;
}

ExperimentResult run_experiment(const SimConfig& cfg) {
    cfg.validate();

    ExperimentResult result;
    result.summary.config = cfg;
    result.rounds.reserve(cfg.rounds);

    std::vector<NodeId> miners(cfg.n);
    for (std::uint32_t i = 0; i < cfg.n; ++i) {
        miners[i] = i;
    }
    std::vector<EligibilityRecord> records;
    records.reserve(cfg.n);
    for (NodeId id : miners) {
        records.push_back({id, 0, true});
    }

    Beacon beacon = genesis_beacon(cfg.genesis);
    EnergyLedger pow_energy;
    EnergyLedger pots_energy;
    RewardLedger pow_rewards{{}, cfg.reward_microunits};
    RewardLedger pots_rewards{{}, cfg.reward_microunits};

    std::uint64_t pow_duration_sum = 0;
    std::uint64_t pots_duration_sum = 0;
    auto& pow_arm = result.summary.pow;
    auto& pots_arm = result.summary.pots;

    for (std::uint64_t r = 1; r <= cfg.rounds; ++r) {
        RoundRecord record;
        record.round = r;

        auto pow_rng = derive_rng_stream(cfg.seed,
                                         "arm/pow/round/" + std::to_string(r));
        record.pow = run_pow_round(r, miners, cfg.total_target, cfg.mode,
                                   cfg.tick_budget, pow_rng);
        pow_energy.charge(record.pow.attempts_by_node);
        if (record.pow.completed) {
            pow_arm.rounds_completed += 1;
            pow_duration_sum += record.pow.duration_ticks;
            pow_rewards.cumulative[record.pow.winner_node] +=
                cfg.reward_microunits;
        } else {
            pow_arm.incomplete_rounds += 1;
        }

        auto pots_out = run_round_pots(cfg, r, beacon, records);
        record.pots = std::move(pots_out.result);
        record.beacon_advanced = pots_out.beacon_advanced;
        record.beacon = pots_out.next_beacon;
        record.assignment = pots_out.assignment;
        pots_energy.charge(record.pots.attempts_by_node);
        if (record.pots.completed) {
            pots_arm.rounds_completed += 1;
            pots_duration_sum += record.pots.duration_ticks;
            distribute_rewards(pots_rewards,
                               record.assignment.groups[record.pots.winner_group],
                               cfg.reward_microunits);
        } else {
            pots_arm.incomplete_rounds += 1;
        }
        if (pots_out.beacon_advanced) {
            beacon = pots_out.next_beacon;
            for (auto& rec : records) {
                for (const auto& team : record.assignment.groups) {
                    if (std::find(team.begin(), team.end(), rec.node) !=
                        team.end()) {
                        rec.rounds_participated += 1;
                        break;
                    }
                }
            }
        }

        result.rounds.push_back(std::move(record));
    }

    for (NodeId id : miners) {
        pow_arm.attempts[id] = 0;
        pow_arm.rewards[id] = 0;
        pots_arm.attempts[id] = 0;
        pots_arm.rewards[id] = 0;
    }
    for (const auto& [id, count] : pow_energy.attempts) {
        pow_arm.attempts[id] = count;
    }
    for (const auto& [id, amount] : pow_rewards.cumulative) {
        pow_arm.rewards[id] = amount;
    }
    for (const auto& [id, count] : pots_energy.attempts) {
        pots_arm.attempts[id] = count;
    }
    for (const auto& [id, amount] : pots_rewards.cumulative) {
        pots_arm.rewards[id] = amount;
    }
    pow_arm.total_energy = pow_energy.total();
    pots_arm.total_energy = pots_energy.total();
    if (pow_arm.rounds_completed > 0) {
        pow_arm.mean_duration_ticks =
            static_cast<double>(pow_duration_sum) /
            static_cast<double>(pow_arm.rounds_completed);
    }
    if (pots_arm.rounds_completed > 0) {
        pots_arm.mean_duration_ticks =
            static_cast<double>(pots_duration_sum) /
            static_cast<double>(pots_arm.rounds_completed);
    }
    if (pow_arm.total_energy > 0) {
        result.summary.energy_ratio =
            static_cast<double>(pots_arm.total_energy) /
            static_cast<double>(pow_arm.total_energy);
    }
    return result;
}

}  // namespace pots
