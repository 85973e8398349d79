#include "pots/trace.hpp"

#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace pots {

namespace {

using nlohmann::json;

json u256_json(const u256& v) {
    return to_hex64(v);
}

u256 u256_field(const json& j, const char* key) {
    return u256_from_hex(j.at(key).get<std::string>());
}

json attempts_json(const std::map<NodeId, std::uint64_t>& attempts) {
    json rows = json::array();
    for (const auto& [id, count] : attempts) {
        rows.push_back(json::array({id, count}));
    }
    return rows;
}

std::map<NodeId, std::uint64_t> attempts_field(const json& rows) {
    std::map<NodeId, std::uint64_t> attempts;
    for (const auto& row : rows) {
        attempts[row.at(0).get<NodeId>()] = row.at(1).get<std::uint64_t>();
    }
    return attempts;
}

json beacon_json(const Beacon& b) {
    json contributions = json::array();
    for (const auto& c : b.contributions) {
        contributions.push_back(u256_json(c));
    }
    return {{"round", b.round},
            {"value", u256_json(b.value)},
            {"prev_value", u256_json(b.prev_value)},
            {"contributors", b.contributors},
            {"contributions", contributions}};
}

Beacon beacon_field(const json& j) {
    Beacon b;
    b.round = j.at("round").get<std::uint64_t>();
    b.value = u256_field(j, "value");
    b.prev_value = u256_field(j, "prev_value");
    b.contributors = j.at("contributors").get<std::vector<NodeId>>();
    for (const auto& c : j.at("contributions")) {
        b.contributions.push_back(u256_from_hex(c.get<std::string>()));
    }
    return b;
}

json assignment_json(const TeamAssignment& a) {
    return {{"round", a.round},
            {"group_size", a.group_size},
            {"groups", a.groups},
            {"benched", a.benched}};
}

TeamAssignment assignment_field(const json& j) {
    TeamAssignment a;
    a.round = j.at("round").get<std::uint64_t>();
    a.group_size = j.at("group_size").get<std::uint32_t>();
    a.groups = j.at("groups").get<std::vector<std::vector<NodeId>>>();
    a.benched = j.at("benched").get<std::vector<NodeId>>();
    return a;
}

json link_json(const ChainLink& link) {
    json stages = json::array();
    for (const auto& s : link.stages) {
        stages.push_back({{"stage_index", s.stage_index},
                          {"participant", s.participant},
                          {"input_digest", u256_json(s.input_digest)},
                          {"nonce", s.nonce},
                          {"output_digest", u256_json(s.output_digest)},
                          {"attempts", s.attempts}});
    }
    return {{"round", link.round},
            {"group_id", link.group_id},
            {"payload_digest", u256_json(link.payload_digest)},
            {"root_digest", u256_json(link.root_digest)},
            {"stages", stages}};
}

ChainLink link_field(const json& j) {
    ChainLink link;
    link.round = j.at("round").get<std::uint64_t>();
    link.group_id = j.at("group_id").get<std::uint32_t>();
    link.payload_digest = u256_field(j, "payload_digest");
    link.root_digest = u256_field(j, "root_digest");
    for (const auto& s : j.at("stages")) {
        StageProof proof;
        proof.stage_index = s.at("stage_index").get<std::uint16_t>();
        proof.participant = s.at("participant").get<NodeId>();
        proof.input_digest = u256_field(s, "input_digest");
        proof.nonce = s.at("nonce").get<std::uint64_t>();
        proof.output_digest = u256_field(s, "output_digest");
        proof.attempts = s.at("attempts").get<std::uint64_t>();
        link.stages.push_back(proof);
    }
    return link;
}

json pots_result_json(const RoundResult& r) {
    json j = {{"completed", r.completed},
              {"duration_ticks", r.duration_ticks},
              {"attempts", attempts_json(r.attempts_by_node)}};
    if (r.completed) {
        j["winner_group"] = r.winner_group;
        j["link"] = r.winning_link ? link_json(*r.winning_link) : json(nullptr);
    }
    return j;
}

json pow_result_json(const RoundResult& r) {
    json j = {{"completed", r.completed},
              {"duration_ticks", r.duration_ticks},
              {"attempts", attempts_json(r.attempts_by_node)}};
    if (r.completed) {
        j["winner"] = r.winner_node;
        if (r.winning_proof) {
            j["proof"] = {{"miner", r.winning_proof->miner},
                          {"nonce", r.winning_proof->nonce},
                          {"digest", u256_json(r.winning_proof->output_digest)}};
        }
    }
    return j;
}

RoundResult pots_result_field(const json& j, std::uint64_t round) {
    RoundResult r;
    r.round = round;
    r.protocol = Protocol::PoTS;
    r.completed = j.at("completed").get<bool>();
    r.duration_ticks = j.at("duration_ticks").get<std::uint64_t>();
    r.attempts_by_node = attempts_field(j.at("attempts"));
    if (r.completed) {
        r.winner_group = j.at("winner_group").get<std::uint32_t>();
        if (j.contains("link") && !j.at("link").is_null()) {
            r.winning_link = link_field(j.at("link"));
        }
    }
    return r;
}

RoundResult pow_result_field(const json& j, std::uint64_t round) {
    RoundResult r;
    r.round = round;
    r.protocol = Protocol::PoW;
    r.completed = j.at("completed").get<bool>();
    r.duration_ticks = j.at("duration_ticks").get<std::uint64_t>();
    r.attempts_by_node = attempts_field(j.at("attempts"));
    if (r.completed) {
        r.winner_node = j.at("winner").get<NodeId>();
        if (j.contains("proof")) {
            const auto& p = j.at("proof");
            r.winning_proof = PowProof{round, p.at("miner").get<NodeId>(),
                                       p.at("nonce").get<std::uint64_t>(),
                                       u256_field(p, "digest")};
        }
    }
    return r;
}

json config_json(const SimConfig& cfg) {
    return {{"seed", cfg.seed},
            {"n", cfg.n},
            {"N", cfg.group_size},
            {"rounds", cfg.rounds},
            {"threshold", u256_json(cfg.total_target.threshold)},
            {"mode", mode_name(cfg.mode)},
            {"latency_ticks", cfg.latency_ticks},
            {"failure_prob", cfg.failure_prob},
            {"reward_microunits", cfg.reward_microunits},
            {"contributor_count", cfg.contributor_count},
            {"min_participation", cfg.min_participation},
            {"tick_budget", cfg.tick_budget},
            {"genesis", u256_json(cfg.genesis)}};
}

SimConfig config_field(const json& j) {
    SimConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.n = j.at("n").get<std::uint32_t>();
    cfg.group_size = j.at("N").get<std::uint32_t>();
    cfg.rounds = j.at("rounds").get<std::uint64_t>();
    cfg.total_target.threshold = u256_field(j, "threshold");
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "idealized") {
        cfg.mode = Mode::Idealized;
    } else if (mode == "stochastic") {
        cfg.mode = Mode::Stochastic;
    } else {
        throw std::runtime_error("trace: unknown mode '" + mode + "'");
    }
    cfg.latency_ticks = j.at("latency_ticks").get<std::uint64_t>();
    cfg.failure_prob = j.at("failure_prob").get<double>();
    cfg.reward_microunits = j.at("reward_microunits").get<std::uint64_t>();
    cfg.contributor_count = j.at("contributor_count").get<std::uint32_t>();
    cfg.min_participation = j.at("min_participation").get<std::uint64_t>();
    cfg.tick_budget = j.at("tick_budget").get<std::uint64_t>();
    cfg.genesis = u256_field(j, "genesis");
    return cfg;
}

json arm_json(const ArmSummary& arm) {
    json per_node = json::array();
    for (const auto& [id, attempts] : arm.attempts) {
        const auto it = arm.rewards.find(id);
        per_node.push_back({{"id", id},
                            {"attempts", attempts},
                            {"reward", it == arm.rewards.end() ? 0 : it->second}});
    }
    return {{"rounds_completed", arm.rounds_completed},
            {"incomplete_rounds", arm.incomplete_rounds},
            {"total_energy_units", arm.total_energy},
            {"mean_duration_ticks", arm.mean_duration_ticks},
            {"per_node", per_node}};
}

ArmSummary arm_field(const json& j) {
    ArmSummary arm;
    arm.rounds_completed = j.at("rounds_completed").get<std::uint64_t>();
    arm.incomplete_rounds = j.at("incomplete_rounds").get<std::uint64_t>();
    arm.total_energy = j.at("total_energy_units").get<std::uint64_t>();
    arm.mean_duration_ticks = j.at("mean_duration_ticks").get<double>();
    for (const auto& row : j.at("per_node")) {
        const auto id = row.at("id").get<NodeId>();
        arm.attempts[id] = row.at("attempts").get<std::uint64_t>();
        arm.rewards[id] = row.at("reward").get<std::uint64_t>();
    }
    return arm;
}

}  // namespace

std::string trace_header_line(const SimConfig& cfg) {
    const json j = {{"schema", kTraceSchema},
                    {"type", "header"},
                    {"config", config_json(cfg)},
                    {"genesis", beacon_json(genesis_beacon(cfg.genesis))}};
    return j.dump();
}

std::string round_record_line(const RoundRecord& record) {
    json j = {{"schema", kTraceSchema},
              {"type", "round"},
              {"round", record.round},
              {"pots", pots_result_json(record.pots)},
              {"pow", pow_result_json(record.pow)}};
    if (record.beacon_advanced) {
        j["beacon"] = beacon_json(record.beacon);
        j["assignment"] = assignment_json(record.assignment);
    } else {
        j["beacon"] = nullptr;
        j["assignment"] = nullptr;
    }
    return j.dump();
}

void write_trace(std::ostream& out, const ExperimentResult& result) {
    out << trace_header_line(result.summary.config) << '\n';
    for (const auto& record : result.rounds) {
        out << round_record_line(record) << '\n';
    }
}

std::string summary_json(const ExperimentSummary& summary) {
    const json j = {{"schema", kTraceSchema},
                    {"config", config_json(summary.config)},
                    {"pow", arm_json(summary.pow)},
                    {"pots", arm_json(summary.pots)},
                    {"energy_ratio", summary.energy_ratio}};
    return j.dump(2);
}

TraceHeader parse_trace_header(const std::string& line) {
    const json j = json::parse(line);
    if (j.at("schema").get<int>() != kTraceSchema) {
        throw std::runtime_error("trace: unsupported schema version");
    }
    if (j.at("type").get<std::string>() != "header") {
        throw std::runtime_error("trace: first record is not a header");
    }
    TraceHeader header;
    header.config = config_field(j.at("config"));
    header.genesis = beacon_field(j.at("genesis"));
    return header;
}

RoundRecord parse_round_record(const std::string& line) {
    const json j = json::parse(line);
    if (j.at("schema").get<int>() != kTraceSchema) {
        throw std::runtime_error("trace: unsupported schema version");
    }
    if (j.at("type").get<std::string>() != "round") {
        throw std::runtime_error("trace: expected a round record");
    }
    RoundRecord record;
    record.round = j.at("round").get<std::uint64_t>();
    record.beacon_advanced = !j.at("beacon").is_null();
    if (record.beacon_advanced) {
        record.beacon = beacon_field(j.at("beacon"));
        record.assignment = assignment_field(j.at("assignment"));
    }
    record.pots = pots_result_field(j.at("pots"), record.round);
    record.pow = pow_result_field(j.at("pow"), record.round);
    return record;
}

ExperimentSummary parse_summary(const std::string& text) {
    const json j = json::parse(text);
    ExperimentSummary summary;
    summary.config = config_field(j.at("config"));
    summary.pow = arm_field(j.at("pow"));
    summary.pots = arm_field(j.at("pots"));
    summary.energy_ratio = j.at("energy_ratio").get<double>();
    return summary;
}

}  // namespace pots
