// Command-line front end: validate, run, compare, sweep.
//
// Exit codes: 0 success, 1 invariant violation, 2 configuration error,
// 3 solver failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nsf/config.hpp"
#include "nsf/errors.hpp"
#include "nsf/experiment.hpp"
#include "nsf/problem.hpp"

namespace {

struct Source {
    std::string config_path;
    std::string preset;
    std::map<std::string, std::string> overrides;
};

// One flag per schema key, e.g. --problem.m0 2.
void add_source_options(CLI::App* cmd, Source& src) {
    cmd->add_option("config", src.config_path, "configuration file (key = value)");
    cmd->add_option("--preset", src.preset, "start from a built-in preset");
    for (const auto& key : nsf::config_keys()) {
        cmd->add_option_function<std::string>(
               "--" + key, [&src, key](const std::string& v) { src.overrides[key] = v; }, "override " + key)
            ->group("Config keys");
    }
}

nsf::ExperimentConfig load(const Source& src) {
    nsf::ExperimentConfig cfg;
    if (!src.config_path.empty() && !src.preset.empty())
        throw nsf::ConfigError(nsf::ConfigErrc::Syntax, "give either a config file or --preset, not both");
    if (!src.config_path.empty())
        cfg = nsf::load_config(src.config_path);
    else if (!src.preset.empty())
        cfg = nsf::preset(src.preset);
    for (const auto& [k, v] : src.overrides) {
        try {
            nsf::set_config_value(cfg, k, v);
        } catch (const nsf::ConfigError& e) {
            throw nsf::ConfigError(e.code(), std::string("--") + k + ": " + e.what());
        }
    }
    nsf::validate(cfg);
    return cfg;
}

void print_warnings(const nsf::ExperimentConfig& cfg) {
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes-Fourier stability toolkit " NSF_VERSION};
    app.require_subcommand(1);
    app.set_version_flag("--version", NSF_VERSION);

    Source vsrc, rsrc, ssrc;
    auto* validate_cmd = app.add_subcommand("validate", "check a configuration and print its canonical form");
    add_source_options(validate_cmd, vsrc);

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    add_source_options(run_cmd, rsrc);

    std::string man_a, man_b;
    auto* compare_cmd = app.add_subcommand("compare", "column-wise deviation between two runs");
    compare_cmd->add_option("manifest_a", man_a, "manifest.json of the first run")->required();
    compare_cmd->add_option("manifest_b", man_b, "manifest.json of the second run")->required();

    std::string sweep_key, sweep_values;
    bool stationary_only = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a configuration over a list of values of one key");
    add_source_options(sweep_cmd, ssrc);
    sweep_cmd->add_option("--key", sweep_key, "config key to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_cmd->add_flag("--stationary-only", stationary_only, "solve the stationary problem only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            nsf::ExperimentConfig cfg = load(vsrc);
            print_warnings(cfg);
            const nsf::Grid g = nsf::make_grid(cfg);
            std::cout << nsf::canonical_text(cfg);
            std::printf("# epsilon = %.17g\n# data_norm = %.17g\n", nsf::epsilon_report(cfg.problem, g),
                        nsf::data_norm(cfg.problem, g));
            return 0;
        }
        if (*run_cmd) {
            nsf::ExperimentConfig cfg = load(rsrc);
            print_warnings(cfg);
            const nsf::RunManifest m = nsf::run_experiment(cfg);
            std::cout << "status " << nsf::to_string(m.status) << " (stage " << m.stage << ")\n"
                      << "steps " << m.steps << ", retries " << m.retries << ", wall " << m.wall_seconds << " s\n"
                      << "output " << cfg.output_dir << "/manifest.json\n";
            if (!m.message.empty()) std::cerr << "error: " << m.message << '\n';
            for (const auto& v : m.violations) std::cerr << "violation: " << v << '\n';
            return nsf::exit_code(m.status);
        }
        if (*compare_cmd) {
            const nsf::CompareReport rep = nsf::compare_runs(man_a, man_b);
            std::printf("rows %zu\n%-40s %-24s %s\n", rep.rows, "column", "max_abs", "max_rel");
            for (const auto& c : rep.columns)
                std::printf("%-40s %-24.17g %.17g\n", c.column.c_str(), c.max_abs, c.max_rel);
            return 0;
        }
        if (*sweep_cmd) {
            nsf::ExperimentConfig cfg = load(ssrc);
            print_warnings(cfg);
            const auto pts = nsf::sweep(cfg, sweep_key, split(sweep_values), stationary_only);
            int rc = 0;
            std::printf("%-16s %-12s %-24s %-24s %s\n", sweep_key.c_str(), "status", "theta_dev", "u_dev",
                        "final_relative_energy");
            for (const auto& p : pts) {
                std::printf("%-16s %-12s %-24.17g %-24.17g %.17g\n", p.value.c_str(), nsf::to_string(p.status).c_str(),
                            p.proximity.theta_dev, p.proximity.u_dev, p.final_relative_energy);
                rc = std::max(rc, nsf::exit_code(p.status));
            }
            std::cout << "summary " << cfg.output_dir << "/sweep.csv\n";
            return rc;
        }
    } catch (const nsf::ConfigError& e) {
        std::cerr << "config error [" << nsf::to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const nsf::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
