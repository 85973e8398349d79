#include "pots/hashcash.hpp"

#include <cstring>
#include <vector>

#include "pots/errors.hpp"

namespace pots {

bool meets_target(const u256& d, const Target& t) {
    return d < t.threshold;
}

bool meets_target(const Digest& d, const Digest& threshold_be) {
    return std::memcmp(d.data(), threshold_be.data(), 32) < 0;
}

SearchResult search(std::span<const std::uint8_t> preimage_prefix,
                    const Target& t,
                    std::uint64_t start_nonce,
                    std::uint64_t max_attempts) {
    std::vector<std::uint8_t> buf(preimage_prefix.size() + 8);
    std::memcpy(buf.data(), preimage_prefix.data(), preimage_prefix.size());
    std::uint8_t* nonce_at = buf.data() + preimage_prefix.size();

    const Digest threshold_be = to_be_bytes(t.threshold);

    SearchResult result;
    std::uint64_t nonce = start_nonce;
    for (std::uint64_t i = 0; i < max_attempts; ++i, ++nonce) {
        store_u64_be(nonce_at, nonce);
        const Digest d = sha256(buf);
        ++result.attempts;
        if (meets_target(d, threshold_be)) {
            result.nonce = nonce;
            result.output_digest = u256_from_be(d);
            return result;
        }
    }
    return result;
}

Target stage_target(const Target& total, std::uint32_t group_size) {
    const bigint scaled = bigint(total.threshold) * group_size;
    const bigint limit = u256_modulus() - 1;
    return Target{scaled > limit ? u256_max() : u256(scaled)};
}

std::uint64_t expected_attempts(const Target& t) {
    // round-to-nearest division, half away from zero
    const bigint n = u256_modulus() + bigint(t.threshold) / 2;
    const bigint e = n / bigint(t.threshold);
    if (e > bigint(~std::uint64_t{0})) {
        throw Error(Errc::InvalidConfig,
                    "expected attempts for target exceed 64 bits");
    }
    return e.convert_to<std::uint64_t>();
}

}  // namespace pots
