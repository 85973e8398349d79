#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pots/errors.hpp"
#include "pots/hashcash.hpp"
#include "pots/sha256.hpp"

#include "support/helpers.hpp"

using namespace pots;
using testsupport::bytes_of;
using testsupport::ref_sha256;

TEST_CASE("digest matches the reference vectors") {
    CHECK(to_hex64(digest({})) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const auto abc = bytes_of("abc");
    CHECK(to_hex64(digest(abc)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("digest is deterministic") {
    const auto data = bytes_of("some fixed input");
    CHECK(digest(data) == digest(data));
}

TEST_CASE("digest agrees with the independent reference implementation") {
    std::mt19937_64 gen(2024);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::uint8_t> data(gen() % 300);
        for (auto& b : data) {
            b = static_cast<std::uint8_t>(gen());
        }
        CHECK(sha256(data) == ref_sha256(data));
    }
}

TEST_CASE("meets_target is strict") {
    CHECK(meets_target(u256(0), Target{1}));
    const Target t{u256(1) << 200};
    CHECK_FALSE(meets_target(t.threshold, t));
    CHECK(meets_target(t.threshold - 1, t));
}

TEST_CASE("search finds immediately under the easiest target") {
    const Target easy{u256_max()};
    const auto prefix = bytes_of("immediate");
    const auto res = search(prefix, easy, 17, 100);
    REQUIRE(res.found());
    CHECK(res.attempts <= 2);
    CHECK(*res.nonce >= 17);
    CHECK(*res.nonce < 17 + res.attempts);
}

TEST_CASE("search exhausts an impossible target") {
    const Target impossible{1};  // success probability 2^-256
    const auto prefix = bytes_of("never");
    const auto res = search(prefix, impossible, 0, 100);
    CHECK_FALSE(res.found());
    CHECK(res.attempts == 100);
}

TEST_CASE("search reproduces the frozen reference scan") {
    // brute-forced with the reference SHA-256 over
    // "pots-search-example" || nonce, threshold 2^248
    const Target t{u256(1) << 248};
    const auto prefix = bytes_of("pots-search-example");
    const auto res = search(prefix, t, 0, 10'000);
    REQUIRE(res.found());
    CHECK(*res.nonce == 226);
    CHECK(res.attempts == 227);
    CHECK(to_hex64(res.output_digest) ==
          "006cf040b87475b59b7e03a123cbc3e58c2fe3d22ccd4cdf7f1e000c5cd66a2b");
}

TEST_CASE("found results re-verify and earlier nonces all miss") {
    const Target t{u256(1) << 250};
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint8_t> prefix(16);
        for (auto& b : prefix) {
            b = static_cast<std::uint8_t>(gen());
        }
        const auto res = search(prefix, t, 0, 1'000'000);
        REQUIRE(res.found());

        auto full = prefix;
        put_u64_be(full, *res.nonce);
        CHECK(digest(full) == res.output_digest);
        CHECK(meets_target(res.output_digest, t));
        CHECK(res.attempts == *res.nonce + 1);

        for (std::uint64_t nonce = 0; nonce < *res.nonce; ++nonce) {
            auto probe = prefix;
            put_u64_be(probe, nonce);
            CHECK_FALSE(meets_target(digest(probe), t));
        }
    }
}

TEST_CASE("empirical attempt count matches 1/p") {
    // p = 2^-10 => geometric mean 1024
    const Target t{u256(1) << 246};
    std::uint64_t total = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        std::vector<std::uint8_t> prefix;
        put_u64_be(prefix, 0xa77e0000 + trial);
        const auto res = search(prefix, t, 0, 1 << 20);
        REQUIRE(res.found());
        total += res.attempts;
    }
    const double mean = static_cast<double>(total) / 1000.0;
    CHECK(mean > 0.85 * 1024.0);
    CHECK(mean < 1.15 * 1024.0);
}

TEST_CASE("stage_target scales the threshold") {
    const Target total{u256(1) << 248};
    CHECK(stage_target(total, 1) == total);
    CHECK(stage_target(total, 4).threshold == u256(1) << 250);
    CHECK(stage_target(Target{u256(1) << 255}, 4).threshold == u256_max());
}

TEST_CASE("stage_target conserves expected work analytically") {
    for (const std::uint32_t n : {1u, 2u, 4u, 8u, 16u}) {
        const Target total{u256(1) << 248};
        const Target per_stage = stage_target(total, n);
        CHECK(n * expected_attempts(per_stage) == expected_attempts(total));
    }
}

TEST_CASE("stage_target conserves expected work empirically") {
    // p = 2^-8, N = 4: four sequential stage searches should cost about
    // 1/p = 256 attempts in total
    const Target total{u256(1) << 248};
    const Target per_stage = stage_target(total, 4);
    std::uint64_t total_attempts = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        for (std::uint64_t stage = 0; stage < 4; ++stage) {
            std::vector<std::uint8_t> prefix;
            put_u64_be(prefix, trial * 16 + stage);
            put_u64_be(prefix, 0x57a6e);
            const auto res = search(prefix, per_stage, 0, 1 << 20);
            REQUIRE(res.found());
            total_attempts += res.attempts;
        }
    }
    const double mean = static_cast<double>(total_attempts) / 1000.0;
    CHECK(mean > 0.9 * 256.0);
    CHECK(mean < 1.1 * 256.0);
}

TEST_CASE("expected_attempts rounds the reciprocal") {
    CHECK(expected_attempts(Target{u256(1) << 252}) == 16);
    CHECK(expected_attempts(Target{u256_max()}) == 1);
    CHECK(expected_attempts(Target{(u256(1) << 255) + (u256(1) << 254)}) == 1);
    CHECK_THROWS_AS(expected_attempts(Target{1}), Error);
}
