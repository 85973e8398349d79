#include "pots/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pots/errors.hpp"
#include "pots/trace.hpp"

namespace pots {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    // shortest fixed-notation representation that round-trips
    char buf[64];
    const auto [end, ec] =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    return std::string(buf, end);
}

const std::set<std::string> kTopKeys = {"scenarios", "max_cells"};
const std::set<std::string> kScenarioKeys = {
    "name",          "seed",        "n",
    "N",             "rounds",      "target_exponent",
    "threshold_hex", "mode",        "latency_ticks",
    "failure_prob",  "reward_microunits", "contributor_count",
    "min_participation", "tick_budget", "genesis_hex",
    "sweep"};
const std::set<std::string> kSweepKeys = {"n", "N", "mode", "failure_prob"};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(key, where + ": unknown key '" + key + "'");
        }
    }
}

Mode parse_mode(const std::string& s) {
    if (s == "idealized") return Mode::Idealized;
    if (s == "stochastic") return Mode::Stochastic;
    throw ConfigError("mode", "mode must be 'idealized' or 'stochastic', got '" +
                                  s + "'");
}

template <typename T>
T get_field(const json& obj, const char* key) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key, std::string("invalid value for '") + key + "'");
    }
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == '.' || c == '-';
    });
}

struct AxisValues {
    std::vector<std::uint32_t> n;
    std::vector<std::uint32_t> group_size;
    std::vector<Mode> mode;
    std::vector<double> failure_prob;
    bool sweeps_n = false, sweeps_group = false, sweeps_mode = false,
         sweeps_failure = false;
};

void expand_scenario(const json& sc, std::size_t index,
                     std::vector<Cell>& cells) {
    if (!sc.is_object()) {
        throw ConfigError("scenarios", "each scenario must be an object");
    }
    reject_unknown_keys(sc, kScenarioKeys, "scenario");

    const std::string name = sc.contains("name")
                                 ? get_field<std::string>(sc, "name")
                                 : "cell" + std::to_string(index);
    if (!valid_name(name)) {
        throw ConfigError("name",
                          "scenario name must be non-empty [A-Za-z0-9_.-]");
    }

    SimConfig base;
    if (!sc.contains("seed")) throw ConfigError("seed", "missing field 'seed'");
    if (!sc.contains("rounds"))
        throw ConfigError("rounds", "missing field 'rounds'");
    base.seed = get_field<std::uint64_t>(sc, "seed");
    base.rounds = get_field<std::uint64_t>(sc, "rounds");

    if (sc.contains("target_exponent") == sc.contains("threshold_hex")) {
        throw ConfigError("target_exponent",
                          "exactly one of 'target_exponent' or "
                          "'threshold_hex' is required");
    }
    if (sc.contains("target_exponent")) {
        const auto e = get_field<std::uint32_t>(sc, "target_exponent");
        if (e > 255) {
            throw ConfigError("target_exponent",
                              "target_exponent must be in [0, 255]");
        }
        base.total_target.threshold = u256(1) << e;
    } else {
        try {
            base.total_target.threshold =
                u256_from_hex(get_field<std::string>(sc, "threshold_hex"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("threshold_hex", e.what());
        }
    }

    base.latency_ticks = sc.contains("latency_ticks")
                             ? get_field<std::uint64_t>(sc, "latency_ticks")
                             : 0;
    base.reward_microunits =
        sc.contains("reward_microunits")
            ? get_field<std::uint64_t>(sc, "reward_microunits")
            : 1'000'000;
    base.min_participation =
        sc.contains("min_participation")
            ? get_field<std::uint64_t>(sc, "min_participation")
            : 0;
    base.tick_budget = sc.contains("tick_budget")
                           ? get_field<std::uint64_t>(sc, "tick_budget")
                           : 1'000'000;
    if (sc.contains("genesis_hex")) {
        try {
            base.genesis = u256_from_hex(get_field<std::string>(sc, "genesis_hex"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("genesis_hex", e.what());
        }
    }

    AxisValues axes;
    if (sc.contains("sweep")) {
        const auto& sweep = sc.at("sweep");
        if (!sweep.is_object()) {
            throw ConfigError("sweep", "'sweep' must be an object of arrays");
        }
        reject_unknown_keys(sweep, kSweepKeys, "sweep");
        for (const auto& [key, arr] : sweep.items()) {
            if (!arr.is_array() || arr.empty()) {
                throw ConfigError(key, "sweep axis '" + key +
                                           "' must be a non-empty array");
            }
        }
        if (sweep.contains("n")) {
            axes.sweeps_n = true;
            axes.n = get_field<std::vector<std::uint32_t>>(sweep, "n");
        }
        if (sweep.contains("N")) {
            axes.sweeps_group = true;
            axes.group_size = get_field<std::vector<std::uint32_t>>(sweep, "N");
        }
        if (sweep.contains("mode")) {
            axes.sweeps_mode = true;
            for (const auto& m :
                 get_field<std::vector<std::string>>(sweep, "mode")) {
                axes.mode.push_back(parse_mode(m));
            }
        }
        if (sweep.contains("failure_prob")) {
            axes.sweeps_failure = true;
            axes.failure_prob =
                get_field<std::vector<double>>(sweep, "failure_prob");
        }
    }

    if (!axes.sweeps_n) {
        if (!sc.contains("n")) throw ConfigError("n", "missing field 'n'");
        axes.n = {get_field<std::uint32_t>(sc, "n")};
    } else if (sc.contains("n")) {
        throw ConfigError("n", "'n' given both directly and as a sweep axis");
    }
    if (!axes.sweeps_group) {
        if (!sc.contains("N")) throw ConfigError("N", "missing field 'N'");
        axes.group_size = {get_field<std::uint32_t>(sc, "N")};
    } else if (sc.contains("N")) {
        throw ConfigError("N", "'N' given both directly and as a sweep axis");
    }
    if (!axes.sweeps_mode) {
        axes.mode = {sc.contains("mode")
                         ? parse_mode(get_field<std::string>(sc, "mode"))
                         : Mode::Idealized};
    } else if (sc.contains("mode")) {
        throw ConfigError("mode",
                          "'mode' given both directly and as a sweep axis");
    }
    if (!axes.sweeps_failure) {
        axes.failure_prob = {sc.contains("failure_prob")
                                 ? get_field<double>(sc, "failure_prob")
                                 : 0.0};
    } else if (sc.contains("failure_prob")) {
        throw ConfigError(
            "failure_prob",
            "'failure_prob' given both directly and as a sweep axis");
    }

    for (const auto n : axes.n) {
        for (const auto group : axes.group_size) {
            for (const auto mode : axes.mode) {
                for (const auto failure : axes.failure_prob) {
                    Cell cell;
                    cell.config = base;
                    cell.config.n = n;
                    cell.config.group_size = group;
                    cell.config.mode = mode;
                    cell.config.failure_prob = failure;
                    cell.config.contributor_count =
                        sc.contains("contributor_count")
                            ? get_field<std::uint32_t>(sc, "contributor_count")
                            : std::min<std::uint32_t>(3, n);
                    cell.id = name;
                    if (axes.sweeps_n) cell.id += "-n" + std::to_string(n);
                    if (axes.sweeps_group)
                        cell.id += "-N" + std::to_string(group);
                    if (axes.sweeps_mode)
                        cell.id += std::string("-") + mode_name(mode);
                    if (axes.sweeps_failure)
                        cell.id += "-f" + fmt_double(failure);

                    if (cell.config.group_size > cell.config.n) {
                        throw ConfigError("N", "N exceeds n");
                    }
                    try {
                        cell.config.validate();
                    } catch (const Error& e) {
                        throw ConfigError("config", std::string(e.what()) +
                                                        " (cell " + cell.id +
                                                        ")");
                    }
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
}

}  // namespace

ScenarioFile parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("file", "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("file", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("file", "top level must be a JSON object");
    }
    reject_unknown_keys(doc, kTopKeys, "top level");
    if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
        throw ConfigError("scenarios", "'scenarios' must be an array");
    }
    const std::uint64_t max_cells =
        doc.contains("max_cells") ? get_field<std::uint64_t>(doc, "max_cells")
                                  : 256;

    ScenarioFile scenario;
    std::size_t index = 0;
    for (const auto& sc : doc.at("scenarios")) {
        expand_scenario(sc, index++, scenario.cells);
    }
    if (scenario.cells.size() > max_cells) {
        throw ConfigError("max_cells",
                          "sweep expands to " +
                              std::to_string(scenario.cells.size()) +
                              " cells, above the limit of " +
                              std::to_string(max_cells));
    }
    std::set<std::string> ids;
    for (const auto& cell : scenario.cells) {
        if (!ids.insert(cell.id).second) {
            throw ConfigError("name", "duplicate cell id '" + cell.id + "'");
        }
    }
    return scenario;
}

std::string results_csv_header() {
    return "scenario,protocol,mode,n,N,rounds_completed,total_energy_units,"
           "energy_ratio,mean_duration_ticks,reward_min,reward_max,"
           "reward_mean";
}

namespace {

std::string csv_row(const std::string& cell_id, const char* protocol,
                    const SimConfig& cfg, const ArmSummary& arm,
                    double energy_ratio) {
    std::uint64_t reward_min = 0;
    std::uint64_t reward_max = 0;
    std::uint64_t reward_sum = 0;
    bool first = true;
    for (const auto& [id, reward] : arm.rewards) {
        reward_min = first ? reward : std::min(reward_min, reward);
        reward_max = std::max(reward_max, reward);
        reward_sum += reward;
        first = false;
    }
    const double reward_mean =
        arm.rewards.empty()
            ? 0.0
            : static_cast<double>(reward_sum) /
                  static_cast<double>(arm.rewards.size());

    std::ostringstream row;
    row << cell_id << ',' << protocol << ',' << mode_name(cfg.mode) << ','
        << cfg.n << ',' << cfg.group_size << ',' << arm.rounds_completed << ','
        << arm.total_energy << ',' << fmt_double(energy_ratio) << ','
        << fmt_double(arm.mean_duration_ticks) << ',' << reward_min << ','
        << reward_max << ',' << fmt_double(reward_mean);
    return row.str();
}

void write_results_csv(const std::filesystem::path& out_dir,
                       std::map<std::string, ExperimentSummary>& by_cell,
                       std::ostream* echo) {
    std::ofstream csv(out_dir / "results.csv", std::ios::binary);
    if (!csv) {
        throw std::runtime_error("cannot write " +
                                 (out_dir / "results.csv").string());
    }
    csv << results_csv_header() << '\n';
    if (echo) {
        *echo << results_csv_header() << '\n';
    }
    for (const auto& [id, summary] : by_cell) {
        for (const auto& row : results_csv_rows(id, summary)) {
            csv << row << '\n';
            if (echo) {
                *echo << row << '\n';
            }
        }
    }
}

}  // namespace

std::vector<std::string> results_csv_rows(const std::string& cell_id,
                                          const ExperimentSummary& summary) {
    // "pots" sorts before "pow"
    return {csv_row(cell_id, "pots", summary.config, summary.pots,
                    summary.energy_ratio),
            csv_row(cell_id, "pow", summary.config, summary.pow,
                    summary.energy_ratio)};
}

int run_scenario(const ScenarioFile& scenario,
                 const std::filesystem::path& out_dir,
                 const RunOptions& options) {
    std::filesystem::create_directories(out_dir);

    const std::size_t cell_count = scenario.cells.size();
    std::vector<ExperimentSummary> summaries(cell_count);
    std::vector<bool> had_incomplete(cell_count, false);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cell_count) {
                return;
            }
            try {
                const auto& cell = scenario.cells[i];
                auto result = run_experiment(cell.config);
                std::ofstream trace(out_dir / (cell.id + ".trace.ndjson"),
                                    std::ios::binary);
                if (!trace) {
                    throw std::runtime_error("cannot write trace for cell " +
                                             cell.id);
                }
                write_trace(trace, result);
                std::ofstream summary(out_dir / (cell.id + ".summary.json"),
                                      std::ios::binary);
                if (!summary) {
                    throw std::runtime_error("cannot write summary for cell " +
                                             cell.id);
                }
                summary << summary_json(result.summary) << '\n';
                had_incomplete[i] =
                    result.summary.pow.incomplete_rounds > 0 ||
                    result.summary.pots.incomplete_rounds > 0;
                summaries[i] = std::move(result.summary);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    const unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1 || cell_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        const unsigned spawn = std::min<std::size_t>(jobs, cell_count);
        threads.reserve(spawn);
        for (unsigned t = 0; t < spawn; ++t) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    std::map<std::string, ExperimentSummary> by_cell;
    for (std::size_t i = 0; i < cell_count; ++i) {
        by_cell.emplace(scenario.cells[i].id, std::move(summaries[i]));
    }
    write_results_csv(out_dir, by_cell, nullptr);

    const bool incomplete = std::any_of(had_incomplete.begin(),
                                        had_incomplete.end(),
                                        [](bool b) { return b; });
    return incomplete ? 2 : 0;
}

VerifyReport verify_trace(const std::filesystem::path& trace_path) {
    std::ifstream in(trace_path);
    if (!in) {
        throw std::runtime_error("cannot open " + trace_path.string());
    }

    VerifyReport report;
    std::string line;
    std::uint64_t line_no = 0;

    if (!std::getline(in, line)) {
        report.invalid_records += 1;
        report.problems.push_back("line 1: missing trace header");
        return report;
    }
    ++line_no;

    TraceHeader header;
    try {
        header = parse_trace_header(line);
    } catch (const std::exception& e) {
        report.invalid_records += 1;
        report.problems.push_back("line 1: malformed header: " + std::string(e.what()));
        return report;
    }
    const SimConfig& cfg = header.config;
    const Target link_target = cfg.mode == Mode::Idealized
                                   ? Target{u256_max()}
                                   : stage_target(cfg.total_target,
                                                  cfg.group_size);
    const Target pow_target = cfg.mode == Mode::Idealized ? Target{u256_max()}
                                                          : cfg.total_target;

    if (header.genesis != genesis_beacon(cfg.genesis)) {
        report.invalid_records += 1;
        report.problems.push_back("line 1: genesis beacon does not match config");
        return report;
    }
    report.valid_records += 1;

    std::vector<EligibilityRecord> records;
    records.reserve(cfg.n);
    for (std::uint32_t i = 0; i < cfg.n; ++i) {
        records.push_back({i, 0, true});
    }
    Beacon prev = header.genesis;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fail = [&](const std::string& why) {
            report.invalid_records += 1;
            report.problems.push_back("line " + std::to_string(line_no) + ": " +
                                      why);
        };

        RoundRecord record;
        try {
            record = parse_round_record(line);
        } catch (const std::exception& e) {
            fail(std::string("malformed record: ") + e.what());
            continue;
        }

        if (!record.beacon_advanced) {
            if (record.pots.completed) {
                fail("round completed without a beacon");
                continue;
            }
            report.valid_records += 1;
            continue;
        }

        std::vector<EligibilityRecord> eligible;
        for (const auto& rec : records) {
            if (is_eligible(rec, cfg.min_participation)) {
                eligible.push_back(rec);
            }
        }

        const auto beacon_check =
            verify_beacon(record.beacon, prev, eligible, cfg.contributor_count);
        if (!beacon_check) {
            fail(std::string("beacon: ") +
                 beacon_fault_name(beacon_check.fault));
            continue;
        }

        std::vector<NodeId> eligible_ids;
        eligible_ids.reserve(eligible.size());
        for (const auto& rec : eligible) {
            eligible_ids.push_back(rec.node);
        }
        const auto expected_assignment = form_teams(
            record.beacon.value, eligible_ids, cfg.group_size, record.round);
        if (record.assignment != expected_assignment) {
            fail("assignment does not recompute from the beacon");
            continue;
        }

        bool ok = true;
        if (record.pots.completed) {
            if (!record.pots.winning_link) {
                fail("completed round without a winning link");
                ok = false;
            } else if (record.pots.winning_link->group_id !=
                       record.pots.winner_group) {
                fail("winning link group does not match winner");
                ok = false;
            } else {
                const auto check =
                    validate_chainlink(*record.pots.winning_link,
                                       record.assignment, link_target,
                                       record.beacon.value);
                if (!check) {
                    fail(std::string("chain link: ") +
                         chain_fault_name(check.fault));
                    ok = false;
                }
            }
        }
        if (ok && record.pow.completed) {
            if (!record.pow.winning_proof) {
                fail("completed PoW round without a proof");
                ok = false;
            } else if (record.pow.winning_proof->miner !=
                           record.pow.winner_node ||
                       record.pow.winning_proof->round != record.round) {
                fail("PoW proof does not match the round winner");
                ok = false;
            } else if (!verify_pow_proof(*record.pow.winning_proof,
                                         pow_target)) {
                fail("PoW proof does not verify");
                ok = false;
            }
        }
        if (ok) {
            report.valid_records += 1;
        }

        prev = record.beacon;
        for (auto& rec : records) {
            for (const auto& team : record.assignment.groups) {
                if (std::find(team.begin(), team.end(), rec.node) !=
                    team.end()) {
                    rec.rounds_participated += 1;
                    break;
                }
            }
        }
    }
    return report;
}

int summarize(const std::filesystem::path& dir, std::ostream& out) {
    std::map<std::string, ExperimentSummary> by_cell;
    const std::string suffix = ".summary.json";
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const std::string name = entry.path().filename().string();
        if (name.size() <= suffix.size() ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) !=
                0) {
            continue;
        }
        std::ifstream in(entry.path());
        if (!in) {
            throw std::runtime_error("cannot open " + entry.path().string());
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string cell_id = name.substr(0, name.size() - suffix.size());
        by_cell.emplace(cell_id, parse_summary(buffer.str()));
    }
    if (by_cell.empty()) {
        return 1;
    }
    write_results_csv(dir, by_cell, &out);
    return 0;
}

}  // namespace pots
