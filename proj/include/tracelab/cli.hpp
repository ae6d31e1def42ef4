#pragma once

/**
 * @file cli.hpp
 * @brief Experiment driver: every experiment is a subcommand with a
 *        reproducible config and machine-readable JSON/CSV output.
 *
 * Exit codes: 0 success (or verification pass), 1 verification failure,
 * 2 usage or config error.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include "tracelab/json_out.hpp"
#include "tracelab/weights.hpp"

namespace tracelab {

inline constexpr const char* kSchemaTag = "trace-lab/1";
inline constexpr const char* kToolVersion = "0.1.0";

/**
 * @brief Everything a run needs; round-trips through JSON losslessly and
 *        the seed fully determines any sampling.
 */
struct ExperimentConfig {
    std::string command;
    std::vector<u32> primes;
    WeightSpec weight;
    double M = 1.0;
    double P = 0.5;
    u32 interval_lo = 0;  // 0 means the full interval [1, p]
    u32 interval_hi = 0;
    u64 seed = 1;
    int threads = 0;
    u32 level = 2;           // resonance level N
    u64 count = 100;         // resonance instance count
    std::vector<i64> gamma_entries;  // corr one
    double tau_x = 0.0;
    double tau_y = 1.0;
    u64 n_max = 0;           // coefficient cap override (0 = derive)
    std::vector<i64> poly;   // orbit polynomial twist (empty = weight twist)
    std::string out_path;
    std::string csv_path;
    std::string svg_path;
};

JsonValue weight_spec_to_json(const WeightSpec& spec);
WeightSpec weight_spec_from_json_text(const std::string& text);
/// Bare kind name ("kloosterman") with defaults, or a full JSON object.
WeightSpec parse_weight_arg(const std::string& arg);

JsonValue config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_text(const std::string& text);

/// Run the CLI; out/err are the command's stdout/stderr.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tracelab
