#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pots/simnet.hpp"

namespace pots {

/// One expanded sweep cell: a runnable config with its unique id (scenario
/// name plus axis suffixes).
struct Cell {
    std::string id;
    SimConfig config;
};

/// A parsed scenario file after sweep expansion and validation.
struct ScenarioFile {
    std::vector<Cell> cells;
};

/// Parses and validates a JSON scenario file: named configs with optional
/// sweep axes over n, N, mode and failure_prob. Unknown keys are rejected.
/// Throws ConfigError.
ScenarioFile parse_config(const std::filesystem::path& path);

struct RunOptions {
    unsigned jobs = 1;
};

/// Runs every cell, writing <id>.trace.ndjson and <id>.summary.json per cell
/// plus a combined results.csv into out_dir. Returns 0 on full success, 2 if
/// any cell had incomplete rounds. Throws on I/O failure.
int run_scenario(const ScenarioFile& scenario,
                 const std::filesystem::path& out_dir,
                 const RunOptions& options = {});

struct VerifyReport {
    std::uint64_t valid_records = 0;
    std::uint64_t invalid_records = 0;
    std::vector<std::string> problems;

    bool all_valid() const { return invalid_records == 0; }
};

/// Re-validates a trace end to end: the beacon chain from genesis, the
/// recomputed team assignments, and every winning chain link / PoW proof.
/// Malformed records are listed as problems. Throws on I/O failure.
VerifyReport verify_trace(const std::filesystem::path& trace_path);

/// Rebuilds results.csv from the per-cell summary files in dir, writes it
/// back and echoes it to out. Returns 0, or 1 when dir holds no summaries.
int summarize(const std::filesystem::path& dir, std::ostream& out);

/// Fixed column set; columns are never reordered.
std::string results_csv_header();

/// The two CSV rows (pots, pow) for one cell summary.
std::vector<std::string> results_csv_rows(const std::string& cell_id,
                                          const ExperimentSummary& summary);

}  // namespace pots
