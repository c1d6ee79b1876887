#pragma once

// Experiment orchestration: config parsing, result persistence, plot tables.
//
// A run directory receives
//   manifest.json   config echo, version, wall clock, error (always written)
//   result.json     kind-specific payload
//   <kind>.csv      kind-specific rows
//   plot_*.csv      tidy tables derived from result.json
//
// CSV dialect everywhere: comma separator, '.' decimal point, one header
// row, UTF-8, LF line endings.  Floating-point cells are printed with %.17g
// so reruns of the same config + seed are byte-identical (the lone exception
// is the runtime_s column of epsilon_sweep.csv, which measures wall clock).

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hjlab/cell.hpp"
#include "hjlab/homogenize.hpp"
#include "hjlab/scenario.hpp"
#include "hjlab/spacetime.hpp"
#include "hjlab/traffic.hpp"

namespace hjlab {

inline constexpr const char *version_string = "hjlab 0.1.0";

// %.17g — enough digits to round-trip a double, stable across runs.
std::string fmt_g17(double v);

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows);

struct ExperimentConfig {
    std::string kind; // cauchy | effective_hamiltonian | flux_limiter |
                      // epsilon_sweep | traffic_checks
    std::string label = "run"; // config file stem; names the run directory

    JunctionScenario scenario;    // all kinds except effective_hamiltonian
    nlohmann::json hamiltonian;   // effective_hamiltonian: field descriptor
    InitialDatum u0 = InitialDatum::zero();

    // numerics
    double dx = 0.02;
    double cfl_safety = 0.45;
    double T = 40.0;
    std::vector<double> rho_schedule;              // empty = default sweep
    std::vector<double> epsilons{0.2, 0.1, 0.05};  // epsilon_sweep
    double tol = 0.02;                             // bracket-overlap / check slack
    double T_sweep = 2.0;                          // epsilon_sweep horizon
    double x_radius = 4.0;                         // epsilon_sweep domain half-width
    double dx_effective = 1.0 / 128;               // epsilon_sweep coarse grid
    int oversample = 20;                           // fine-grid cells per epsilon

    // cauchy
    double x_lo = -4.0, x_hi = 4.0;
    std::vector<double> snapshot_times; // empty = eighths of [0, T]

    // effective_hamiltonian
    std::vector<double> p_values{-2.0, -1.0, 0.0, 1.0, 2.0};
    int cell_nodes = 128;
    double cell_T = 30.0;

    // traffic_checks
    std::vector<std::string> checks;   // empty = every applicable check
    std::uint64_t seed = 12345;
    int n_random = 5;
    std::vector<double> spacing_deltas{0.5, 1.0};
    std::vector<double> merge_scales{1.0, 0.5, 0.25};

    std::string output_dir; // optional; CLI --out and HJLAB_OUT_ROOT override

    nlohmann::json raw; // verbatim input, echoed into the manifest
};

// Field-checked parsers.  All throw ConfigInvalid naming the offending field.
JunctionScenario scenario_from_json(const nlohmann::json &j);
InitialDatum u0_from_json(const nlohmann::json &j);
SpaceTimeHamiltonian spacetime_from_json(const nlohmann::json &j);
ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

// Default output root: $HJLAB_OUT_ROOT if set, else "runs".
std::string default_output_root();

struct RunResult {
    int exit_code = 0; // 0 ok, 1 gating check failed, 3 error (see manifest)
    std::string out_dir;
};

// Execute one experiment.  Creates out_dir, writes result files, and always
// leaves a manifest.json behind — on error it records the message instead of
// rethrowing.  jobs > 1 parallelizes independent sub-runs; results are
// assembled in input order either way, so outputs do not depend on jobs.
RunResult run_experiment(const ExperimentConfig &cfg, const std::string &out_dir,
                         int jobs = 1);

// Reshape run_dir/result.json into tidy plot_*.csv tables.
void emit_plot_data(const std::string &run_dir);

} // namespace hjlab
