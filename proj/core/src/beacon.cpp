#include "pots/beacon.hpp"

#include <algorithm>
#include <unordered_set>

#include "pots/errors.hpp"
#include "pots/sha256.hpp"

namespace pots {

Beacon genesis_beacon(const u256& genesis_value) {
    Beacon b;
    b.round = 0;
    b.value = genesis_value;
    b.prev_value = 0;
    return b;
}

bool is_eligible(const EligibilityRecord& rec, std::uint64_t min_participation) {
    return rec.online && rec.rounds_participated >= min_participation;
}

u256 xor_combine(const std::vector<u256>& contributions) {
    if (contributions.empty()) {
        throw Error(Errc::EmptyContributions,
                    "xor_combine: contribution list is empty");
    }
    u256 acc = 0;
    for (const u256& c : contributions) {
        acc ^= c;
    }
    return acc;
}

u256 ranking_digest(const u256& beacon_value, NodeId id) {
    std::vector<std::uint8_t> pre;
    pre.reserve(40);
    put_u256_be(pre, beacon_value);
    put_u64_be(pre, id);
    return digest(pre);
}

namespace {

std::vector<NodeId> rank_nodes(const u256& beacon_value,
                               const std::vector<NodeId>& nodes) {
    std::vector<std::pair<u256, NodeId>> keyed;
    keyed.reserve(nodes.size());
    for (NodeId id : nodes) {
        keyed.emplace_back(ranking_digest(beacon_value, id), id);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<NodeId> ranked;
    ranked.reserve(keyed.size());
    for (const auto& [key, id] : keyed) {
        ranked.push_back(id);
    }
    return ranked;
}

}  // namespace

std::vector<NodeId> select_contributors(const u256& beacon_value,
                                        const std::vector<EligibilityRecord>& eligible,
                                        std::size_t k) {
    if (k > eligible.size()) {
        throw Error(Errc::InsufficientNodes,
                    "select_contributors: k exceeds eligible count");
    }
    std::vector<NodeId> ids;
    ids.reserve(eligible.size());
    for (const auto& rec : eligible) {
        ids.push_back(rec.node);
    }
    auto ranked = rank_nodes(beacon_value, ids);
    ranked.resize(k);
    return ranked;
}

Beacon advance_beacon(const Beacon& prev,
                      const std::vector<std::pair<NodeId, u256>>& contributions,
                      const std::vector<EligibilityRecord>& eligible,
                      std::size_t k) {
    const auto selected = select_contributors(prev.value, eligible, k);

    std::unordered_set<NodeId> allowed(selected.begin(), selected.end());
    std::unordered_set<NodeId> seen;
    for (const auto& [id, value] : contributions) {
        if (!allowed.contains(id)) {
            throw Error(Errc::UnauthorizedContributor,
                        "advance_beacon: contributor was not selected");
        }
        if (!seen.insert(id).second) {
            throw Error(Errc::DuplicateContributor,
                        "advance_beacon: duplicate contributor");
        }
    }
    if (seen.size() != selected.size()) {
        throw Error(Errc::MissingContributor,
                    "advance_beacon: a selected contributor is missing");
    }

    Beacon next;
    next.round = prev.round + 1;
    next.prev_value = prev.value;
    next.contributors = selected;  // ranking order
    next.contributions.reserve(selected.size());
    for (NodeId id : selected) {
        const auto it = std::find_if(contributions.begin(), contributions.end(),
                                     [id](const auto& p) { return p.first == id; });
        next.contributions.push_back(it->second);
    }
    next.value = xor_combine(next.contributions);
    return next;
}

const char* beacon_fault_name(BeaconFault fault) {
    switch (fault) {
        case BeaconFault::None: return "None";
        case BeaconFault::BadLinkage: return "BadLinkage";
        case BeaconFault::BadFold: return "BadFold";
        case BeaconFault::BadContributorSet: return "BadContributorSet";
    }
    return "Unknown";
}

BeaconCheck verify_beacon(const Beacon& b,
                          const Beacon& prev,
                          const std::vector<EligibilityRecord>& eligible,
                          std::size_t k) {
    if (b.round != prev.round + 1 || b.prev_value != prev.value) {
        return {BeaconFault::BadLinkage};
    }
    if (b.contributions.empty() || xor_combine(b.contributions) != b.value) {
        return {BeaconFault::BadFold};
    }
    if (k > eligible.size()) {
        return {BeaconFault::BadContributorSet};
    }
    const auto selected = select_contributors(prev.value, eligible, k);
    if (b.contributors != selected ||
        b.contributions.size() != b.contributors.size()) {
        return {BeaconFault::BadContributorSet};
    }
    return {BeaconFault::None};
}

TeamAssignment form_teams(const u256& beacon_value,
                          const std::vector<NodeId>& eligible,
                          std::uint32_t group_size,
                          std::uint64_t round) {
    if (group_size == 0) {
        throw Error(Errc::InvalidGroupSize, "form_teams: group_size is 0");
    }
    const auto ranked = rank_nodes(beacon_value, eligible);

    TeamAssignment a;
    a.round = round;
    a.group_size = group_size;
    const std::size_t full_groups = ranked.size() / group_size;
    a.groups.reserve(full_groups);
    std::size_t i = 0;
    for (std::size_t g = 0; g < full_groups; ++g) {
        std::vector<NodeId> group;
        group.reserve(group_size);
        for (std::uint32_t j = 0; j < group_size; ++j) {
            group.push_back(ranked[i++]);
        }
        a.groups.push_back(std::move(group));
    }
    a.benched.assign(ranked.begin() + static_cast<std::ptrdiff_t>(i), ranked.end());
    return a;
}

}  // namespace pots
