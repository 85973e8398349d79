#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "pots/u256.hpp"

namespace pots {

using Digest = std::array<std::uint8_t, 32>;

/// Raw SHA-256 of the input bytes.
Digest sha256(std::span<const std::uint8_t> data);

/// SHA-256 interpreted as a big-endian 256-bit integer.
u256 digest(std::span<const std::uint8_t> data);

}  // namespace pots
