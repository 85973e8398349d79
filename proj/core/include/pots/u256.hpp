#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pots {

/// 256-bit unsigned integer used for digests, beacon values and difficulty
/// thresholds.
using u256 = boost::multiprecision::uint256_t;

/// Arbitrary-precision integer for intermediates that exceed 256 bits
/// (stage-target scaling, expected-attempt division).
using bigint = boost::multiprecision::cpp_int;

inline u256 u256_max() {
    return ~u256(0);
}

/// 2^256 as an arbitrary-precision value (one past u256_max()).
bigint u256_modulus();

std::array<std::uint8_t, 32> to_be_bytes(const u256& v);
u256 u256_from_be(std::span<const std::uint8_t> bytes);

/// 64 lowercase hex digits, zero padded.
std::string to_hex64(const u256& v);

/// Parses 1..64 hex digits (case-insensitive). Throws std::invalid_argument
/// on anything else.
u256 u256_from_hex(std::string_view hex);

// Big-endian append helpers for building fixed-layout preimages.
void put_u16_be(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_u256_be(std::vector<std::uint8_t>& out, const u256& v);

/// Writes v into buf[0..8) big-endian; buf must have room.
void store_u64_be(std::uint8_t* buf, std::uint64_t v);

}  // namespace pots
