#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "evtwalk/measure.hpp"

namespace evtwalk {

// One flat bag of knobs for every mode; unused keys keep their defaults.
// Precedence when building: defaults < config file < EVTWALK_SEED < CLI.
struct ExperimentConfig {
    std::string mode;

    // model
    int d = 2;
    std::uint32_t bits = 64;
    std::string space; // torus | lattice | excursion
    std::vector<MatD> generators; // empty -> documented defaults
    std::vector<double> weights;  // empty -> equal

    // walk sizes and schedules
    std::uint64_t n = 4096;
    std::uint64_t trajectories = 20000;
    std::string schedule = "full"; // full | sparse | gap
    std::uint64_t sparse_a = 8;

    // grids and mode-specific knobs
    std::vector<double> r_grid;
    std::vector<double> z_grid;
    std::vector<std::uint64_t> q_list;
    std::vector<int> i_list;
    double s = 10.0;
    std::uint64_t trials = 200000;
    std::uint64_t n_samples = 1000000;
    std::uint64_t seeds = 64;
    std::uint64_t j_max = 32;
    double r = 0.0;
    double marginal_target = 0.05;

    // optional fitted inputs
    double lambda_hat = std::numeric_limits<double>::quiet_NaN();
    double c0_hat = std::numeric_limits<double>::quiet_NaN();
    double w_hat = std::numeric_limits<double>::quiet_NaN();
    double k_scale = 0.0; // 0 = automatic (d, or 1 for excursions)
    std::uint64_t upper_a = 8;

    // numerics
    double lll_delta = 0.75;
    int renorm_every = 64;
    std::uint64_t burn_in = 1000;

    // run control
    std::uint64_t seed = 20250830;
    unsigned threads = 0; // 0 = hardware; never changes results
    std::string output_dir;
    bool force = false;
};

// Mode-specific defaults; ConfigError for unknown modes.
ExperimentConfig default_config(const std::string& mode);

// Sets one key from its text form; ConfigError on unknown key or bad value.
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

// defaults(mode), then the config file (if any), then EVTWALK_SEED, then the
// command-line overrides, then validation.
ExperimentConfig
parse_config(const std::string& mode, const std::string& config_file,
             const std::vector<std::pair<std::string, std::string>>& overrides);

// Range checks plus derived defaults (r/z grids, space). Throws ConfigError.
void validate_config(ExperimentConfig& cfg);

struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::string kinds; // one char per column: 'i' integer, 'r' real
    std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
    std::vector<ResultTable> tables;
    std::vector<std::pair<std::string, std::string>> meta;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes <name>.csv per table plus a meta.txt sidecar. Refuses a directory
// that already holds results unless force is set.
void emit_results(const ExperimentResult& res, const std::string& dir,
                  bool force);

// 17 significant digits for reals; integers exact.
std::string format_cell(double v, char kind);

// Text forms used in configs and meta echoes.
std::string matrices_to_text(const std::vector<MatD>& ms);
std::vector<MatD> parse_matrices(const std::string& text);

// Checkpoint ladder 10, 30, 100, 300, ... with n appended as the final entry.
std::vector<std::uint64_t> loglaw_checkpoints(std::uint64_t n);

} // namespace evtwalk
