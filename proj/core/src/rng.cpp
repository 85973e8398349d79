#include "pots/rng.hpp"

#include <stdexcept>

#include "pots/u256.hpp"

namespace pots {

RngStream::RngStream(std::uint64_t seed, std::string_view label) {
    prefix_.reserve(8 + label.size());
    put_u64_be(prefix_, seed);
    prefix_.insert(prefix_.end(), label.begin(), label.end());
}

Digest RngStream::block(std::uint64_t i) const {
    std::vector<std::uint8_t> pre = prefix_;
    put_u64_be(pre, i);
    return sha256(pre);
}

std::uint64_t RngStream::next_u64() {
    if (offset_ + 8 > current_.size()) {
        current_ = block(next_block_++);
        offset_ = 0;
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | current_[offset_ + static_cast<std::size_t>(i)];
    }
    offset_ += 8;
    return v;
}

std::uint64_t RngStream::uniform(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("RngStream::uniform: bound is 0");
    }
    // accept only draws above 2^64 mod bound, leaving a whole number of
    // bound-sized intervals
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

bool RngStream::bernoulli(double p) {
    if (p <= 0.0) {
        return false;
    }
    if (p >= 1.0) {
        return true;
    }
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u < p;
}

RngStream derive_rng_stream(std::uint64_t seed, std::string_view label) {
    return RngStream(seed, label);
}

}  // namespace pots
