#include "pots/pow.hpp"

#include <stdexcept>

#include "pots/errors.hpp"

namespace pots {

std::vector<std::uint8_t> pow_preimage(std::uint64_t round, NodeId miner) {
    std::vector<std::uint8_t> pre;
    pre.reserve(16);
    put_u64_be(pre, round);
    put_u64_be(pre, miner);
    return pre;
}

namespace {

RoundResult run_idealized(std::uint64_t round,
                          const std::vector<NodeId>& miners,
                          const Target& t_total,
                          RngStream& rng) {
    RoundResult result;
    result.round = round;
    result.protocol = Protocol::PoW;

    const std::uint64_t solve_attempts = expected_attempts(t_total);
    for (NodeId m : miners) {
        result.attempts_by_node[m] = solve_attempts;
    }
    result.duration_ticks = solve_attempts;

    const NodeId winner = miners[rng.uniform(miners.size())];
    const auto easy = Target{u256_max()};
    const auto found = search(pow_preimage(round, winner), easy, 0, 8);
    if (!found.found()) {
        throw std::logic_error("run_pow_round: easy-target search exhausted");
    }
    result.completed = true;
    result.winner_node = winner;
    result.winning_proof =
        PowProof{round, winner, *found.nonce, found.output_digest};
    return result;
}

RoundResult run_stochastic(std::uint64_t round,
                           const std::vector<NodeId>& miners,
                           const Target& t_total,
                           std::uint64_t tick_budget) {
    RoundResult result;
    result.round = round;
    result.protocol = Protocol::PoW;

    std::vector<std::vector<std::uint8_t>> prefixes;
    prefixes.reserve(miners.size());
    for (NodeId m : miners) {
        auto pre = pow_preimage(round, m);
        pre.resize(pre.size() + 8);
        prefixes.push_back(std::move(pre));
    }
    const Digest threshold_be = to_be_bytes(t_total.threshold);

    for (std::uint64_t tick = 1; tick <= tick_budget; ++tick) {
        const std::uint64_t nonce = tick - 1;
        bool any = false;
        u256 best_digest = 0;
        NodeId best_miner = 0;
        std::uint64_t best_nonce = 0;
        for (std::size_t i = 0; i < miners.size(); ++i) {
            auto& pre = prefixes[i];
            store_u64_be(pre.data() + 16, nonce);
            const Digest d = sha256(pre);
            if (!meets_target(d, threshold_be)) {
                continue;
            }
            const u256 dv = u256_from_be(d);
            if (!any || dv < best_digest ||
                (dv == best_digest && miners[i] < best_miner)) {
                any = true;
                best_digest = dv;
                best_miner = miners[i];
                best_nonce = nonce;
            }
        }
        if (any) {
            result.completed = true;
            result.duration_ticks = tick;
            result.winner_node = best_miner;
            result.winning_proof =
                PowProof{round, best_miner, best_nonce, best_digest};
            for (NodeId m : miners) {
                result.attempts_by_node[m] = tick;
            }
            return result;
        }
    }

    result.completed = false;
    result.duration_ticks = tick_budget;
    for (NodeId m : miners) {
        result.attempts_by_node[m] = tick_budget;
    }
    return result;
}

}  // namespace

RoundResult run_pow_round(std::uint64_t round,
                          const std::vector<NodeId>& miners,
                          const Target& t_total,
                          Mode mode,
                          std::uint64_t tick_budget,
                          RngStream& rng) {
    if (miners.empty()) {
        throw Error(Errc::InsufficientNodes, "run_pow_round: no miners");
    }
    if (mode == Mode::Idealized) {
        return run_idealized(round, miners, t_total, rng);
    }
    return run_stochastic(round, miners, t_total, tick_budget);
}

bool verify_pow_proof(const PowProof& proof, const Target& t) {
    auto pre = pow_preimage(proof.round, proof.miner);
    put_u64_be(pre, proof.nonce);
    const u256 d = digest(pre);
    return d == proof.output_digest && meets_target(d, t);
}

}  // namespace pots
