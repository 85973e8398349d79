#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pots/u256.hpp"

namespace pots {

using NodeId = std::uint64_t;

/// Chained network randomness for one round. `value` is the XOR fold of
/// `contributions`; `contributors[i]` supplied `contributions[i]`.
struct Beacon {
    std::uint64_t round = 0;
    u256 value = 0;
    std::vector<NodeId> contributors;
    std::vector<u256> contributions;
    u256 prev_value = 0;

    bool operator==(const Beacon&) const = default;
};

/// Round-0 beacon: no contributors, value fixed to the configured genesis
/// seed.
Beacon genesis_beacon(const u256& genesis_value);

struct EligibilityRecord {
    NodeId node = 0;
    std::uint64_t rounds_participated = 0;
    bool online = true;
};

/// online AND rounds_participated >= min_participation.
bool is_eligible(const EligibilityRecord& rec, std::uint64_t min_participation);

/// Partition of the eligible nodes for one round: M groups of exactly
/// group_size, remainder benched. Position k within a group is the stage-k
/// participant.
struct TeamAssignment {
    std::uint64_t round = 0;
    std::uint32_t group_size = 1;
    std::vector<std::vector<NodeId>> groups;
    std::vector<NodeId> benched;

    bool operator==(const TeamAssignment&) const = default;
};

/// Left-fold XOR of the contributions. Order-independent. Throws
/// Error(EmptyContributions) on an empty list.
u256 xor_combine(const std::vector<u256>& contributions);

/// Ranking key shared by contributor selection and team formation:
/// SHA-256(beacon_value as 32 BE bytes || node id as 8 BE bytes).
u256 ranking_digest(const u256& beacon_value, NodeId id);

/// The k eligible nodes with the smallest ranking digests, in ranking order.
/// Throws Error(InsufficientNodes) if k exceeds the eligible count.
std::vector<NodeId> select_contributors(const u256& beacon_value,
                                        const std::vector<EligibilityRecord>& eligible,
                                        std::size_t k);

/// Builds the round r+1 beacon from the previous one. The contribution set
/// must be exactly the nodes selected against prev.value (any input order;
/// stored in ranking order).
Beacon advance_beacon(const Beacon& prev,
                      const std::vector<std::pair<NodeId, u256>>& contributions,
                      const std::vector<EligibilityRecord>& eligible,
                      std::size_t k);

enum class BeaconFault {
    None,
    BadLinkage,         // round or prev_value does not chain from prev
    BadFold,            // value != XOR fold of contributions
    BadContributorSet,  // contributors != selection against prev.value
};

const char* beacon_fault_name(BeaconFault fault);

struct BeaconCheck {
    BeaconFault fault = BeaconFault::None;

    explicit operator bool() const { return fault == BeaconFault::None; }
};

BeaconCheck verify_beacon(const Beacon& b,
                          const Beacon& prev,
                          const std::vector<EligibilityRecord>& eligible,
                          std::size_t k);

/// Ranks eligible nodes by ranking_digest ascending and chunks the ranked
/// list into consecutive groups of group_size; the trailing remainder is
/// benched. Throws Error(InvalidGroupSize) when group_size is 0.
TeamAssignment form_teams(const u256& beacon_value,
                          const std::vector<NodeId>& eligible,
                          std::uint32_t group_size,
                          std::uint64_t round = 0);

}  // namespace pots
