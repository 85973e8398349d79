// potsim — runs PoTS vs PoW simulation scenarios, verifies traces and
// rebuilds result tables.
//
// Exit codes: 0 success, 1 error, 2 incomplete rounds, 3 verification
// failure.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pots/errors.hpp"
#include "pots/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Proof of Team Sprint / Proof of Work simulation harness"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON file")
        ->required();
    run->add_option("--out", out_dir, "Output directory")
        ->capture_default_str();
    run->add_option("--jobs", jobs, "Parallel sweep cells")
        ->capture_default_str();

    std::string trace_path;
    auto* verify = app.add_subcommand("verify", "Re-validate a trace file");
    verify->add_option("trace", trace_path, "Trace ndjson file")->required();

    std::string summarize_dir;
    auto* summarize =
        app.add_subcommand("summarize", "Rebuild results.csv from summaries");
    summarize->add_option("dir", summarize_dir, "Directory of cell outputs")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto scenario = pots::parse_config(scenario_path);
            const int rc =
                pots::run_scenario(scenario, out_dir, pots::RunOptions{jobs});
            std::cout << "ran " << scenario.cells.size() << " cell(s) into "
                      << out_dir << "\n";
            if (rc == 2) {
                std::cerr << "warning: some cells had incomplete rounds\n";
            }
            return rc;
        }
        if (verify->parsed()) {
            const auto report = pots::verify_trace(trace_path);
            std::cout << "valid records:   " << report.valid_records << "\n"
                      << "invalid records: " << report.invalid_records << "\n";
            for (const auto& problem : report.problems) {
                std::cout << "  " << problem << "\n";
            }
            return report.all_valid() ? 0 : 3;
        }
        if (summarize->parsed()) {
            const int rc = pots::summarize(summarize_dir, std::cout);
            if (rc != 0) {
                std::cerr << "error: no summaries found in " << summarize_dir
                          << "\n";
            }
            return rc;
        }
    } catch (const pots::ConfigError& e) {
        std::cerr << "config error (" << e.field() << "): " << e.what()
                  << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
