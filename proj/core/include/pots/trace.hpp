#pragma once

#include <iosfwd>
#include <string>

#include "pots/simnet.hpp"

namespace pots {

/// Trace schema version; every ndjson line carries "schema": <this>.
inline constexpr int kTraceSchema = 1;

// One line each, no trailing newline. The header embeds the full SimConfig
// and the genesis beacon; each subsequent line is one round.
std::string trace_header_line(const SimConfig& cfg);
std::string round_record_line(const RoundRecord& record);

/// Header followed by one line per round.
void write_trace(std::ostream& out, const ExperimentResult& result);

/// Single JSON document with per-arm totals, per-node attempts/rewards and
/// the energy ratio.
std::string summary_json(const ExperimentSummary& summary);

// Parsers for the verifier; throw std::runtime_error on malformed input.
struct TraceHeader {
    SimConfig config;
    Beacon genesis;
};
TraceHeader parse_trace_header(const std::string& line);
RoundRecord parse_round_record(const std::string& line);
ExperimentSummary parse_summary(const std::string& text);

}  // namespace pots
