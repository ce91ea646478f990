#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spinwall/hamiltonian.hpp"
#include "spinwall/output.hpp"

namespace spinwall {

// One flat bag of knobs shared by every experiment. defaults_for() seeds the
// per-experiment values; each run_* resolves the remaining sentinels (nc = 0,
// k0 = 0, empty sweep lists) and validates what it actually reads.
struct ExperimentConfig {
    std::string experiment;      // soliton | disorder | transport | floquet3 |
                                 // floquet9 | epr | capacity
    std::string tier = "desk";   // desk | extended

    int nc = 0;        // ring size; 0 picks the tier default
    double j0 = 1.0;   // baseline exchange
    double a0 = 1.0;   // wall amplitude
    double w = 2.0;    // wall width
    double k0 = 0.0;   // wall center; 0 picks the centered default

    double fraction = 0.5;  // multiplicative disorder strength
    int nseeds = 20;
    std::uint64_t seed = 12345;

    std::vector<double> omega_list;  // drive rates, units of the relevant gap
    std::vector<int> s_list;         // wall separations (epr)

    double jt0 = 1.0, jt1 = 0.8, phi = 0.0;  // three-site cosine profile
    Convention conv = Convention::spin_half;

    double j0_uev = 500.0;   // capacity: exchange energy in micro-eV
    double spacing = 100.0;  // capacity: wall spacing in sites

    std::string out;  // output stem; empty = compute only, write nothing
    int threads = 0;  // 0 = hardware (applied by the CLI, echoed here)
    double tol = 1e-10;
    int lanczos_window = 0;
};

ExperimentConfig defaults_for(const std::string& experiment,
                              const std::string& tier = "desk");

// Applies one flat key=value entry. The CLI funnels both config-file lines
// and command-line flags through here, which keeps the two interchangeable.
void set_config_key(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

struct ExperimentResult {
    RunManifest manifest;
    // first table is the primary CSV; extras land in <out>.<name>.csv
    std::vector<std::pair<std::string, OutputTable>> tables;
};

ExperimentResult run_soliton(const ExperimentConfig& cfg);
ExperimentResult run_disorder(const ExperimentConfig& cfg);
ExperimentResult run_transport(const ExperimentConfig& cfg);
ExperimentResult run_floquet3(const ExperimentConfig& cfg);
ExperimentResult run_floquet9(const ExperimentConfig& cfg);
ExperimentResult run_epr(const ExperimentConfig& cfg);
ExperimentResult run_capacity(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment; std::invalid_argument for unknown ids.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes <stem>.csv, <stem>.<name>.csv for extra tables, <stem>.manifest.json.
void write_outputs(const ExperimentResult& r, const std::string& stem);

}  // namespace spinwall
