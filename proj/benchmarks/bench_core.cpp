#include <benchmark/benchmark.h>

#include "pots/hashcash.hpp"
#include "pots/sha256.hpp"
#include "pots/simnet.hpp"

using namespace pots;

static void BM_Sha256_64B(benchmark::State& state) {
    std::vector<std::uint8_t> data(64, 0xab);
    for (auto _ : state) {
        auto d = sha256(data);
        benchmark::DoNotOptimize(d);
        data[0] ^= 1;
    }
}
BENCHMARK(BM_Sha256_64B);

static void BM_Search(benchmark::State& state) {
    // p = 2^-exp; reports attempts/s via counters
    const Target t{u256(1) << (256 - state.range(0))};
    std::uint64_t seed = 0;
    std::uint64_t attempts = 0;
    for (auto _ : state) {
        std::vector<std::uint8_t> prefix;
        put_u64_be(prefix, seed++);
        const auto res = search(prefix, t, 0, 1 << 24);
        attempts += res.attempts;
        benchmark::DoNotOptimize(res);
    }
    state.counters["attempts/s"] = benchmark::Counter(
        static_cast<double>(attempts), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Search)->Arg(8)->Arg(12)->Arg(16);

static void BM_FormTeams(benchmark::State& state) {
    std::vector<NodeId> ids(state.range(0));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }
    u256 beacon = 1;
    for (auto _ : state) {
        auto a = form_teams(beacon, ids, 8);
        benchmark::DoNotOptimize(a);
        beacon += 1;
    }
}
BENCHMARK(BM_FormTeams)->Arg(64)->Arg(256)->Arg(1024);

static void BM_IdealizedRound(benchmark::State& state) {
    SimConfig cfg;
    cfg.seed = 1;
    cfg.n = 64;
    cfg.group_size = 8;
    cfg.rounds = 1;
    cfg.total_target.threshold = u256(1) << 252;
    cfg.mode = Mode::Idealized;

    std::vector<EligibilityRecord> records;
    for (NodeId id = 0; id < cfg.n; ++id) {
        records.push_back({id, 0, true});
    }
    Beacon beacon = genesis_beacon(0);
    std::uint64_t round = 1;
    for (auto _ : state) {
        auto out = run_round_pots(cfg, round++, beacon, records);
        beacon = out.next_beacon;
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_IdealizedRound);

static void BM_StochasticRound(benchmark::State& state) {
    SimConfig cfg;
    cfg.seed = 1;
    cfg.n = 8;
    cfg.group_size = 2;
    cfg.rounds = 1;
    cfg.total_target.threshold = u256(1) << 248;
    cfg.mode = Mode::Stochastic;

    std::vector<EligibilityRecord> records;
    for (NodeId id = 0; id < cfg.n; ++id) {
        records.push_back({id, 0, true});
    }
    Beacon beacon = genesis_beacon(0);
    std::uint64_t round = 1;
    for (auto _ : state) {
        auto out = run_round_pots(cfg, round++, beacon, records);
        beacon = out.next_beacon;
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_StochasticRound);

BENCHMARK_MAIN();
