#include "pots/u256.hpp"

#include <stdexcept>

namespace pots {

bigint u256_modulus() {
    return bigint(1) << 256;
}

std::array<std::uint8_t, 32> to_be_bytes(const u256& v) {
    std::array<std::uint8_t, 32> out{};
    u256 x = v;
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x & 0xffu);
        x >>= 8;
    }
    return out;
}

u256 u256_from_be(std::span<const std::uint8_t> bytes) {
    u256 v = 0;
    for (std::uint8_t b : bytes) {
        v <<= 8;
        v |= b;
    }
    return v;
}

std::string to_hex64(const u256& v) {
    static const char* digits = "0123456789abcdef";
    const auto bytes = to_be_bytes(v);
    std::string s(64, '0');
    for (std::size_t i = 0; i < 32; ++i) {
        s[2 * i] = digits[bytes[i] >> 4];
        s[2 * i + 1] = digits[bytes[i] & 0x0f];
    }
    return s;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

u256 u256_from_hex(std::string_view hex) {
    if (hex.empty() || hex.size() > 64) {
        throw std::invalid_argument("u256_from_hex: expected 1..64 hex digits");
    }
    u256 v = 0;
    for (char c : hex) {
        const int n = hex_nibble(c);
        if (n < 0) {
            throw std::invalid_argument("u256_from_hex: invalid hex digit");
        }
        v <<= 4;
        v |= n;
    }
    return v;
}

void put_u16_be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
}

void put_u256_be(std::vector<std::uint8_t>& out, const u256& v) {
    const auto bytes = to_be_bytes(v);
    out.insert(out.end(), bytes.begin(), bytes.end());
}

void store_u64_be(std::uint8_t* buf, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        buf[7 - i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
    }
}

}  // namespace pots
