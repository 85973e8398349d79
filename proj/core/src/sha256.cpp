#include "pots/sha256.hpp"

#include <openssl/sha.h>

namespace pots {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

u256 digest(std::span<const std::uint8_t> data) {
    return u256_from_be(sha256(data));
}

}  // namespace pots
