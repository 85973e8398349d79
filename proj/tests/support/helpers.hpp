#pragma once

// Shared helpers for the test suites: hex conversion over the reference
// hash, the ranking-key oracle, and chi-square critical values.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "pots/beacon.hpp"
#include "pots/u256.hpp"

#include "ref_sha256.hpp"

namespace testsupport {

inline std::string hex_of(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0f]);
    }
    return s;
}

inline std::vector<std::uint8_t> bytes_of(std::string_view text) {
    return {text.begin(), text.end()};
}

/// Ranking key recomputed through the reference hash, independent of the
/// implementation path under test.
inline pots::u256 ref_ranking_digest(const pots::u256& beacon_value,
                                     pots::NodeId id) {
    std::vector<std::uint8_t> pre;
    const auto value_bytes = pots::to_be_bytes(beacon_value);
    pre.insert(pre.end(), value_bytes.begin(), value_bytes.end());
    for (int i = 7; i >= 0; --i) {
        pre.push_back(static_cast<std::uint8_t>((id >> (8 * i)) & 0xff));
    }
    return pots::u256_from_be(ref_sha256(pre));
}

/// Upper critical value of chi-square with df degrees of freedom at the
/// given significance level.
inline double chi_square_critical(unsigned df, double significance) {
    boost::math::chi_squared dist(df);
    return boost::math::quantile(dist, 1.0 - significance);
}

/// Goodness-of-fit statistic against equal expected counts.
inline double chi_square_statistic(const std::vector<std::uint64_t>& observed,
                                   double expected_per_cell) {
    double stat = 0.0;
    for (const auto o : observed) {
        const double d = static_cast<double>(o) - expected_per_cell;
        stat += d * d / expected_per_cell;
    }
    return stat;
}

}  // namespace testsupport
