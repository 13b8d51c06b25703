#pragma once

// Experiment orchestration: stationary reference, perturbed initial data,
// simulation with diagnostics streaming, and the files a run leaves behind.

#include <map>
#include <string>
#include <vector>

#include "nsf/config.hpp"
#include "nsf/stationary.hpp"

namespace nsf {

/// Perturbed initial state around the stationary reference. All families keep
/// the wall traces (velocity perturbations vanish on the walls) and rescale
/// the density to the exact mass m0. Families:
///   none            reference unchanged
///   density-bump    rho_s (1 + A b), b a Gaussian bump centered in the domain
///   thermal-bump    theta_s (1 + A sin(pi z) h(x))
///   velocity-kick   u_s + A sin(pi z), w_s + A sin(2 pi z) (cos(2 pi x/lx) in 2-D)
///   random-smooth   seeded low-wavenumber sine/cosine expansion of all fields,
///                   bounded by A in sup norm (relative for rho and theta)
/// Throws PositivityError if the result is not positive.
FluidState perturb(const ExperimentConfig& cfg, const Discretization& d, const FluidState& reference);

enum class RunStatus { Ok, InvariantViolation, ConfigError, SolverFailure };

std::string to_string(RunStatus s);
int exit_code(RunStatus s);

struct Artifact {
    std::string path;  ///< relative to the output directory
    std::string sha256;
};

struct RunManifest {
    std::string config_hash;  ///< SHA-256 of config.txt
    std::string version;
    std::string start_time;
    std::string end_time;
    RunStatus status = RunStatus::Ok;
    std::string stage;  ///< last stage entered; names the failing stage on error
    std::string message;
    std::vector<Artifact> artifacts;
    long steps = 0;
    long retries = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
};

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// Runs the whole pipeline and writes into cfg.output_dir:
///   config.txt, metadata.jsonl, diagnostics.csv, stationary.snap,
///   initial.snap, final.snap (and snapshot_NNNN.snap at the snapshot
///   cadence), hypotheses.txt, manifest.json.
/// Never throws for solver or invariant failures; those set the status. The
/// manifest is written in every case.
RunManifest run_experiment(const ExperimentConfig& cfg);

void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

struct ColumnDeviation {
    std::string column;
    double max_abs = 0.0;
    /// max |a - b| / max(max |a|, max |b|) over the column; 0 for two zero columns.
    double max_rel = 0.0;
};

struct CompareReport {
    std::size_t rows = 0;
    std::vector<ColumnDeviation> columns;
    const ColumnDeviation& column(const std::string& name) const;
};

/// Reads a diagnostics CSV: header and rows of doubles.
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_csv(const std::string& path);

/// Column-wise deviations between the diagnostics CSVs of two runs. Throws
/// DomainError when the headers differ or the row counts differ.
CompareReport compare_runs(const std::string& manifest_a, const std::string& manifest_b);
CompareReport compare_csv(const std::string& csv_a, const std::string& csv_b);

struct SweepPoint {
    std::string value;
    double epsilon = 0.0;
    Proximity proximity;
    RunStatus status = RunStatus::Ok;
    double final_relative_energy = 0.0;
    std::string output_dir;
};

/// Runs cfg once per value of `key`, each in <output_dir>/<key>=<value>, and
/// writes <output_dir>/sweep.csv. stationary_only skips the time integration.
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& key,
                              const std::vector<std::string>& values, bool stationary_only = false);

}  // namespace nsf
