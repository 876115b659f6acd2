#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molres/readout.hpp"
#include "molres/reservoir.hpp"
#include "molres/signals.hpp"

namespace molres {

struct SignalConfig {
    MGParams mg;
    long stride = 10;            // integration steps per emitted sample
    double transient_mg_units = 1000.0;
    double out_lo = 0.0;
    double out_hi = 1.0;

    long discard_steps() const;
};

struct ReadoutConfig {
    std::vector<int> h_list{1, 2, 3, 5, 7, 10, 15};
    std::vector<int> k_list{0, 1, 2, 5};
    int d_max = 50;
    double var_frac = 0.95;
    std::vector<double> lambda_grid = default_lambda_grid();
};

/// One experiment: simulation, input signal and readout settings plus seed.
struct ExperimentConfig {
    SimConfig sim;
    SignalConfig signal;
    ReadoutConfig readout;
    std::uint64_t seed = 42;
    bool export_agent_logs = false;

    void validate() const;
};

ExperimentConfig default_experiment_config();

/// Parse a config JSON document. Every field is optional and defaults are
/// materialized; unknown keys are rejected with their JSON path.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical JSON rendering with every field written out explicitly.
std::string canonical_config_json(const ExperimentConfig& config);

/// Content digest of the canonical JSON (seed included).
std::string config_digest(const ExperimentConfig& config);

} // namespace molres
