#pragma once

// Experiment configuration: a flat "key = value" text format with a strict
// schema. Lines starting with '#' are comments. An optional "preset" line
// (before any other key) loads one of the built-in scenarios, and the
// remaining keys override it.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsf/discretization.hpp"
#include "nsf/problem.hpp"
#include "nsf/simulator.hpp"

namespace nsf {

enum class ConfigErrc {
    Syntax = 1,
    UnknownKey,
    DuplicateKey,
    InvalidValue,
    BetaRange,
    MassNonpositive,
    NegativeAmplitude,
    InvalidGrid,
    InvalidTemperature,
    InvalidModel,
    InvalidControl,
    UnknownPreset,
    Io,
};

std::string to_string(ConfigErrc code);

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ConfigErrc code() const noexcept { return code_; }

private:
    ConfigErrc code_;
};

struct ExperimentConfig {
    std::string preset;
    GasModel gas;
    TransportModel transport;
    ProblemConfig problem;
    int nx = 1;
    int nz = 64;
    Reconstruction reconstruction = Reconstruction::Upwind;
    std::string stationary_method = "auto";
    std::string perturbation = "none";
    double amplitude = 0.0;
    int modes = 3;
    std::uint64_t seed = 42;
    double horizon = 1.0;
    double record_interval = 0.1;
    double snapshot_interval = 0.0;
    long max_steps = 0;
    StepControl control;
    std::string output_dir = "run";

    /// Non-fatal findings of validate(), e.g. a large smallness parameter.
    std::vector<std::string> warnings;
};

/// Smallness parameter above which validate() warns that the run is outside
/// the perturbative regime.
constexpr double kPerturbativeEpsilon = 0.1;

/// Names of the perturbation families.
const std::vector<std::string>& perturbation_families();

/// Names of the built-in presets.
const std::vector<std::string>& preset_names();
/// Throws ConfigError(UnknownPreset).
ExperimentConfig preset(const std::string& name);

/// Every schema key, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Throws ConfigError(UnknownKey or InvalidValue).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& cfg, const std::string& key);

/// Semantic checks; fills cfg.warnings. Throws ConfigError with a specific code.
void validate(ExperimentConfig& cfg);

/// Parses and validates. `source` names the input in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Canonical text form: every key in schema order, round-trip precision.
/// parse_config(canonical_text(c)) reproduces c.
std::string canonical_text(const ExperimentConfig& cfg);

Grid make_grid(const ExperimentConfig& cfg);
Discretization make_discretization(const ExperimentConfig& cfg);

}  // namespace nsf
