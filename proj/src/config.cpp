#include "nsf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nsf/errors.hpp"

namespace nsf {

std::string to_string(ConfigErrc code) {
    switch (code) {
        case ConfigErrc::Syntax: return "syntax";
        case ConfigErrc::UnknownKey: return "unknown-key";
        case ConfigErrc::DuplicateKey: return "duplicate-key";
        case ConfigErrc::InvalidValue: return "invalid-value";
        case ConfigErrc::BetaRange: return "beta-range";
        case ConfigErrc::MassNonpositive: return "mass-nonpositive";
        case ConfigErrc::NegativeAmplitude: return "negative-amplitude";
        case ConfigErrc::InvalidGrid: return "invalid-grid";
        case ConfigErrc::InvalidTemperature: return "invalid-temperature";
        case ConfigErrc::InvalidModel: return "invalid-model";
        case ConfigErrc::InvalidControl: return "invalid-control";
        case ConfigErrc::UnknownPreset: return "unknown-preset";
        case ConfigErrc::Io: return "io";
    }
    return "unknown";
}

namespace {

// Shortest text that reads back to the same double.
std::string fmt(double v) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(ConfigErrc::InvalidValue, "key '" + key + "': '" + s + "' is not a finite number");
    return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& s) {
    Int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(ConfigErrc::InvalidValue, "key '" + key + "': '" + s + "' is not an integer");
    return v;
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError(ConfigErrc::InvalidValue, "key '" + key + "': expected true or false, got '" + s + "'");
}

std::string one_of(const std::string& key, const std::string& s, const std::vector<std::string>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), s) != allowed.end()) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(ConfigErrc::InvalidValue, "key '" + key + "': '" + s + "' is not one of " + list);
}

struct KeyEntry {
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define NSF_DOUBLE(name, field)                                                                          \
    {name, KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }, \
                   [](const ExperimentConfig& c) { return fmt(c.field); }}}
#define NSF_INT(name, field, type)                                                                          \
    {name, KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.field = to_int<type>(k, v); }, \
                   [](const ExperimentConfig& c) { return std::to_string(c.field); }}}

const std::vector<std::pair<std::string, KeyEntry>>& schema() {
    static const std::vector<std::pair<std::string, KeyEntry>> keys = {
        NSF_DOUBLE("gas.p_inf", gas.p_inf),
        NSF_DOUBLE("gas.a", gas.a),
        {"gas.pm_family",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     try {
                         c.gas.pm_family = pm_family_from_string(v);
                     } catch (const std::exception&) {
                         throw ConfigError(ConfigErrc::InvalidValue, "key '" + k + "': unknown family '" + v + "'");
                     }
                 },
                 [](const ExperimentConfig& c) { return to_string(c.gas.pm_family); }}},
        NSF_DOUBLE("gas.pm_gain", gas.pm_gain),
        NSF_DOUBLE("gas.z_max_validate", gas.z_max_validate),
        NSF_DOUBLE("transport.mu0", transport.mu0),
        NSF_DOUBLE("transport.eta0", transport.eta0),
        NSF_DOUBLE("transport.kappa0", transport.kappa0),
        NSF_DOUBLE("transport.beta", transport.beta),
        NSF_INT("problem.dimension", problem.dimension, int),
        NSF_DOUBLE("problem.lx", problem.lx),
        NSF_DOUBLE("problem.m0", problem.m0),
        NSF_DOUBLE("problem.theta_bottom", problem.theta_bottom),
        NSF_DOUBLE("problem.theta_top", problem.theta_top),
        NSF_DOUBLE("problem.lateral_amplitude", problem.lateral_amplitude),
        NSF_DOUBLE("problem.gx", problem.gx),
        NSF_DOUBLE("problem.gz", problem.gz),
        NSF_INT("grid.nx", nx, int),
        NSF_INT("grid.nz", nz, int),
        {"scheme.reconstruction",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     c.reconstruction = reconstruction_from_string(one_of(k, v, {"upwind", "minmod"}));
                 },
                 [](const ExperimentConfig& c) { return to_string(c.reconstruction); }}},
        {"stationary.method",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     c.stationary_method = one_of(k, v, {"auto", "static", "pipeline", "newton"});
                 },
                 [](const ExperimentConfig& c) { return c.stationary_method; }}},
        {"perturbation.family",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     c.perturbation = one_of(k, v, perturbation_families());
                 },
                 [](const ExperimentConfig& c) { return c.perturbation; }}},
        NSF_DOUBLE("perturbation.amplitude", amplitude),
        NSF_INT("perturbation.modes", modes, int),
        NSF_INT("seed", seed, std::uint64_t),
        NSF_DOUBLE("run.horizon", horizon),
        NSF_DOUBLE("run.record_interval", record_interval),
        NSF_DOUBLE("run.snapshot_interval", snapshot_interval),
        NSF_INT("run.max_steps", max_steps, long),
        NSF_DOUBLE("control.cfl", control.cfl_target),
        NSF_DOUBLE("control.dt_min", control.dt_min),
        NSF_DOUBLE("control.dt_max", control.dt_max),
        NSF_INT("control.max_retries", control.max_retries, int),
        {"control.adaptive",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     c.control.adaptive = to_bool(k, v);
                 },
                 [](const ExperimentConfig& c) { return std::string(c.control.adaptive ? "true" : "false"); }}},
        {"output.dir",
         KeyEntry{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     if (v.empty()) throw ConfigError(ConfigErrc::InvalidValue, "key '" + k + "' must not be empty");
                     c.output_dir = v;
                 },
                 [](const ExperimentConfig& c) { return c.output_dir; }}},
    };
    return keys;
}

#undef NSF_DOUBLE
#undef NSF_INT

const KeyEntry& entry_for(const std::string& key) {
    for (const auto& [name, entry] : schema())
        if (name == key) return entry;
    throw ConfigError(ConfigErrc::UnknownKey, "unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<std::string>& perturbation_families() {
    static const std::vector<std::string> f = {"none", "density-bump", "thermal-bump", "velocity-kick",
                                               "random-smooth"};
    return f;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> p = {"static-sanity", "rb-1d-small", "rb-2d-topology", "rb-2d-lateral"};
    return p;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "static-sanity") {
        c.nz = 64;
        c.horizon = 1.0;
        c.record_interval = 0.1;
        c.output_dir = "runs/static-sanity";
    } else if (name == "rb-1d-small") {
        c.problem.theta_bottom = 1.05;
        c.problem.theta_top = 1.0;
        c.problem.gz = -0.01;
        c.nz = 128;
        c.perturbation = "random-smooth";
        c.amplitude = 1e-2;
        c.horizon = 50.0;
        c.record_interval = 0.5;
        c.output_dir = "runs/rb-1d-small";
    } else if (name == "rb-2d-topology") {
        c.problem.dimension = 2;
        c.problem.lx = 2.0;
        c.problem.m0 = 2.0;
        c.problem.theta_bottom = 1.05;
        c.problem.theta_top = 1.0;
        c.problem.gz = -0.01;
        c.nx = 16;
        c.nz = 16;
        c.perturbation = "random-smooth";
        c.amplitude = 1e-2;
        c.horizon = 5.0;
        c.record_interval = 0.25;
        c.output_dir = "runs/rb-2d-topology";
    } else if (name == "rb-2d-lateral") {
        c.problem.dimension = 2;
        c.problem.lx = 2.0;
        c.problem.m0 = 2.0;
        c.problem.lateral_amplitude = 2e-3;
        c.problem.gz = -0.01;
        c.nx = 16;
        c.nz = 16;
        c.perturbation = "random-smooth";
        c.amplitude = 1e-2;
        c.horizon = 5.0;
        c.record_interval = 0.25;
        c.output_dir = "runs/rb-2d-lateral";
    } else {
        std::string list;
        for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
        throw ConfigError(ConfigErrc::UnknownPreset, "unknown preset '" + name + "' (available: " + list + ")");
    }
    return c;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, entry] : schema()) k.push_back(name);
        return k;
    }();
    return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    entry_for(key).set(cfg, key, value);
}

std::string get_config_value(const ExperimentConfig& cfg, const std::string& key) { return entry_for(key).get(cfg); }

Grid make_grid(const ExperimentConfig& cfg) { return make_grid(cfg.problem, cfg.nx, cfg.nz); }

Discretization make_discretization(const ExperimentConfig& cfg) {
    const Grid g = make_grid(cfg);
    return Discretization(g, Models{cfg.gas, cfg.transport}, boundary_data(cfg.problem, g), potential(cfg.problem, g),
                          cfg.reconstruction);
}

void validate(ExperimentConfig& cfg) {
    cfg.warnings.clear();
    if (!(cfg.transport.beta > 6.0))
        throw ConfigError(ConfigErrc::BetaRange,
                          "transport.beta = " + fmt(cfg.transport.beta) +
                              " violates the conductivity hypothesis kappa ~ theta^beta with beta > 6");
    try {
        cfg.gas.check();
        cfg.transport.check();
    } catch (const DomainError& e) {
        throw ConfigError(ConfigErrc::InvalidModel, e.what());
    }
    if (!(cfg.problem.m0 > 0.0))
        throw ConfigError(ConfigErrc::MassNonpositive, "problem.m0 = " + fmt(cfg.problem.m0) + " must be positive");
    if (cfg.amplitude < 0.0)
        throw ConfigError(ConfigErrc::NegativeAmplitude,
                          "perturbation.amplitude = " + fmt(cfg.amplitude) + " must be nonnegative");
    if (cfg.amplitude >= 1.0)
        throw ConfigError(ConfigErrc::InvalidValue, "perturbation.amplitude must be below 1 (relative perturbation)");
    if (cfg.modes < 1) throw ConfigError(ConfigErrc::InvalidValue, "perturbation.modes must be at least 1");

    const int dim = cfg.problem.dimension;
    if (dim != 1 && dim != 2) throw ConfigError(ConfigErrc::InvalidGrid, "problem.dimension must be 1 or 2");
    if (cfg.nz < 2) throw ConfigError(ConfigErrc::InvalidGrid, "grid.nz must be at least 2");
    if (dim == 1 && cfg.nx != 1) throw ConfigError(ConfigErrc::InvalidGrid, "grid.nx must be 1 in 1-D");
    if (dim == 2 && cfg.nx < 2) throw ConfigError(ConfigErrc::InvalidGrid, "grid.nx must be at least 2 in 2-D");
    if (dim == 2 && !(cfg.problem.lx > 0.0)) throw ConfigError(ConfigErrc::InvalidGrid, "problem.lx must be positive");

    if (!(cfg.problem.theta_bottom > 0.0) || !(cfg.problem.theta_top > 0.0) ||
        !(std::abs(cfg.problem.lateral_amplitude) < cfg.problem.theta_bottom))
        throw ConfigError(ConfigErrc::InvalidTemperature, "wall temperatures must be positive everywhere");

    const Grid grid = make_grid(cfg);
    try {
        cfg.problem.check(grid);
    } catch (const ProblemError& e) {
        throw ConfigError(ConfigErrc::InvalidValue, e.what());
    }
    if (cfg.stationary_method == "pipeline" && !is_layered(cfg.problem, grid))
        throw ConfigError(ConfigErrc::InvalidValue, "stationary.method = pipeline needs a layered problem");
    if (cfg.stationary_method == "static" && !is_static(cfg.problem, grid))
        throw ConfigError(ConfigErrc::InvalidValue,
                          "stationary.method = static needs constant wall temperature and zero potential");

    try {
        cfg.control.check();
    } catch (const DomainError& e) {
        throw ConfigError(ConfigErrc::InvalidControl, e.what());
    }
    if (!(cfg.horizon >= 0.0) || !(cfg.record_interval >= 0.0) || !(cfg.snapshot_interval >= 0.0) ||
        cfg.max_steps < 0)
        throw ConfigError(ConfigErrc::InvalidControl, "run.* values must be nonnegative");

    const double eps = epsilon_report(cfg.problem, grid);
    if (eps > kPerturbativeEpsilon)
        cfg.warnings.push_back("smallness parameter epsilon = " + fmt(eps) + " exceeds the perturbative regime (" +
                               fmt(kPerturbativeEpsilon) + "); convergence to the stationary state is not expected");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::tuple<int, std::string, std::string>> entries;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError(ConfigErrc::Syntax, where + ": expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(ConfigErrc::Syntax, where + ": missing key");
        if (!seen.insert(key).second) throw ConfigError(ConfigErrc::DuplicateKey, where + ": duplicate key '" + key + "'");
        if (key == "preset" && entries.size() != 0)
            throw ConfigError(ConfigErrc::Syntax, where + ": 'preset' must come before every other key");
        entries.emplace_back(lineno, std::move(key), std::move(value));
    }
    ExperimentConfig cfg;
    for (const auto& [ln, key, value] : entries) {
        try {
            if (key == "preset")
                cfg = preset(value);
            else
                set_config_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.code(), source + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(e.code(), source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(ConfigErrc::Io, "cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path);
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    if (!cfg.preset.empty()) os << "preset = " << cfg.preset << '\n';
    for (const auto& [name, entry] : schema()) os << name << " = " << entry.get(cfg) << '\n';
    return os.str();
}

}  // namespace nsf
