#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nls/dynamics.hpp"
#include "nls/thresholds.hpp"

namespace nls {

enum class Command { Simulate, Groundstate, Threshold, Classify, Dichotomy, Sweep };

struct GridConfig {
    double extent = 0.0;
    std::size_t points = 0;
};

struct InitialConfig {
    std::string kind = "gaussian"; // gaussian | snapshot | ground_state
    double amplitude = 1.0;
    double width = 1.0;
    double quad_phase_sigma = 0.0;
    std::string path; // snapshot file
};

struct ThresholdConfig {
    std::vector<std::string> which; // subset of d_I d_prime_I d_N d_M d_II
    int restarts = 3;
    int descent_steps = 200;
    bool enforce_gate = true;
    bool save_minimizer = false;
};

struct DichotomyConfig {
    std::vector<double> amplitudes;
    double quad_phase_sigma = 0.0;
    double quad_phase_min_c = 1.0;
};

struct SweepConfig {
    std::string command;  // classify | simulate | threshold
    std::string key;      // dotted path, e.g. "initial.amplitude" or "omega"
    std::vector<double> values;
};

struct RunConfig {
    Command command = Command::Simulate;
    ModelSpec model;
    GridConfig grid;
    InitialConfig initial;
    double omega = 1.0;
    EvolveOptions evolve;
    ThresholdConfig threshold;
    DichotomyConfig dichotomy;
    SweepConfig sweep;
    bool observe = false; // classify: also evolve and record the outcome
    std::string output_dir = "out";
    std::string run_id = "run";
    std::uint64_t seed = 1;

    /// Strict parse: unknown keys rejected, all numerics finite, catalog
    /// invariants enforced. Throws ConfigError.
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text);
};

/// Catalog invariants of a model (exponent ranges, kernel admissibility).
void validate_model(const ModelSpec& model);

struct RunResult {
    int exit_code = 0;
    std::string error;
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, std::string>> summary;
};

/// Execute a parsed config: dispatch, write outputs and the manifest under
/// output_dir. Exit codes: 0 ok, 1 config error, 2 hypothesis-gate refusal,
/// 3 numerical failure.
RunResult run_config(const RunConfig& cfg, const std::string& config_bytes, bool quiet);

} // namespace nls
