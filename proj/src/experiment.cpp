#include "nsf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "nsf/diagnostics.hpp"
#include "nsf/errors.hpp"
#include "nsf/simulator.hpp"
#include "nsf/snapshot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace nsf {

// --- perturbations -------------------------------------------------------------------------

namespace {

constexpr double pi = std::numbers::pi;

// Uniform on [-1, 1] from the raw 64-bit stream, independent of the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) { return 2.0 * static_cast<double>(rng() >> 11) * 0x1p-53 - 1.0; }

// Low-wavenumber expansion sum c_{jl} sin(j pi z) trig(2 pi l xi) / (j + l),
// bounded by 1 in sup norm.
struct SmoothField {
    struct Term {
        int j, l;
        bool sine;
        double c;
    };
    std::vector<Term> terms;
    double norm = 0.0;

    SmoothField(std::mt19937_64& rng, int modes, bool two_d) {
        for (int j = 1; j <= modes; ++j) {
            for (int l = 0; l < (two_d ? modes : 1); ++l) {
                for (int s = 0; s < (l == 0 ? 1 : 2); ++s) {
                    const double c = unit(rng) / (j + l);
                    terms.push_back({j, l, s == 1, c});
                    norm += std::abs(c);
                }
            }
        }
    }

    double operator()(double xi, double z) const {
        double v = 0.0;
        for (const auto& t : terms) {
            const double arg = 2.0 * pi * t.l * xi;
            v += t.c * std::sin(t.j * pi * z) * (t.sine ? std::sin(arg) : std::cos(arg));
        }
        return norm > 0.0 ? v / norm : 0.0;
    }
};

double periodic_distance(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

}  // namespace

FluidState perturb(const ExperimentConfig& cfg, const Discretization& d, const FluidState& reference) {
    const Grid& g = d.grid();
    reference.check_shape(g);
    FluidState s = reference;
    const double a = cfg.amplitude;
    const std::string& fam = cfg.perturbation;
    if (fam == "none" || a == 0.0) return s;
    const bool two_d = g.nx > 1;
    auto xi_c = [&](int i) { return (g.x_center(i) - g.x0) / g.lx; };
    auto xi_f = [&](int i) { return static_cast<double>(i) / g.nx; };

    if (fam == "density-bump") {
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double z = g.z_center(k);
                double b = std::exp(-(z - 0.5) * (z - 0.5) / (2.0 * 0.15 * 0.15));
                if (two_d) {
                    const double dxi = periodic_distance(xi_c(i), 0.5);
                    b *= std::exp(-dxi * dxi / (2.0 * 0.15 * 0.15));
                }
                s.rho[g.cell(i, k)] *= 1.0 + a * b;
            }
    } else if (fam == "thermal-bump") {
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double h = two_d ? 0.5 * (1.0 - std::cos(2.0 * pi * xi_c(i))) : 1.0;
                s.theta[g.cell(i, k)] *= 1.0 + a * std::sin(pi * g.z_center(k)) * h;
            }
    } else if (fam == "velocity-kick") {
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) s.u[g.x_face(i, k)] += a * std::sin(pi * g.z_center(k));
        for (int k = 1; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double h = two_d ? std::cos(2.0 * pi * xi_c(i)) : 1.0;
                s.w[g.z_face(i, k)] += a * std::sin(2.0 * pi * k * g.dz()) * h;
            }
    } else if (fam == "random-smooth") {
        std::mt19937_64 rng(cfg.seed);
        const SmoothField fr(rng, cfg.modes, two_d), ft(rng, cfg.modes, two_d), fu(rng, cfg.modes, two_d),
            fw(rng, cfg.modes, two_d);
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const auto c = g.cell(i, k);
                const double z = g.z_center(k);
                s.rho[c] *= 1.0 + a * fr(xi_c(i), z);
                s.theta[c] *= 1.0 + a * ft(xi_c(i), z);
                s.u[g.x_face(i, k)] += a * fu(xi_f(i), z);
            }
        for (int k = 1; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) s.w[g.z_face(i, k)] += a * fw(xi_c(i), k * g.dz());
    } else {
        throw DomainError("unknown perturbation family '" + fam + "'");
    }
    const double scale = cfg.problem.m0 / d.total_mass(s.rho);
    for (double& r : s.rho) r *= scale;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (!(s.rho[c] > 0.0)) throw PositivityError(PositivityError::Field::Density, c, s.rho[c]);
        if (!(s.theta[c] > 0.0)) throw PositivityError(PositivityError::Field::Temperature, c, s.theta[c]);
    }
    return s;
}

// --- manifest ------------------------------------------------------------------------------------

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Ok: return "ok";
        case RunStatus::InvariantViolation: return "invariant-violation";
        case RunStatus::ConfigError: return "config-error";
        case RunStatus::SolverFailure: return "solver-failure";
    }
    return "unknown";
}

namespace {

RunStatus status_from_string(const std::string& s) {
    for (auto st : {RunStatus::Ok, RunStatus::InvariantViolation, RunStatus::ConfigError, RunStatus::SolverFailure})
        if (to_string(st) == s) return st;
    throw DomainError("unknown run status '" + s + "'");
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw DomainError("cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream os(p, std::ios::binary);
    os << bytes;
    if (!os) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

int exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::Ok: return 0;
        case RunStatus::InvariantViolation: return 1;
        case RunStatus::ConfigError: return 2;
        case RunStatus::SolverFailure: return 3;
    }
    return 3;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hexd[md[i] >> 4];
        out += hexd[md[i] & 15];
    }
    return out;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    json j;
    j["config_hash"] = m.config_hash;
    j["toolkit_version"] = m.version;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["status"] = to_string(m.status);
    j["exit_code"] = exit_code(m.status);
    j["stage"] = m.stage;
    j["message"] = m.message;
    j["steps"] = m.steps;
    j["retries"] = m.retries;
    j["wall_seconds"] = m.wall_seconds;
    j["violations"] = m.violations;
    j["warnings"] = m.warnings;
    json arts = json::array();
    for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
    j["artifacts"] = arts;
    write_file(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
        RunManifest m;
        m.config_hash = j.at("config_hash").get<std::string>();
        m.version = j.at("toolkit_version").get<std::string>();
        m.start_time = j.at("start_time").get<std::string>();
        m.end_time = j.at("end_time").get<std::string>();
        m.status = status_from_string(j.at("status").get<std::string>());
        m.stage = j.at("stage").get<std::string>();
        m.message = j.at("message").get<std::string>();
        m.steps = j.at("steps").get<long>();
        m.retries = j.at("retries").get<long>();
        m.wall_seconds = j.at("wall_seconds").get<double>();
        m.violations = j.at("violations").get<std::vector<std::string>>();
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& a : j.at("artifacts")) m.artifacts.push_back({a.at("path"), a.at("sha256")});
        return m;
    } catch (const json::exception& e) {
        throw DomainError("malformed manifest " + path + ": " + e.what());
    }
}

// --- run ---------------------------------------------------------------------------------------

namespace {

json proximity_json(const Proximity& p) {
    return {{"rho_dev", p.rho_dev}, {"theta_dev", p.theta_dev}, {"u_dev", p.u_dev}, {"epsilon", p.epsilon},
            {"ratio", p.ratio}};
}

class RecordChecker {
public:
    RecordChecker(double m0, std::vector<std::string>& out) : m0_(m0), out_(out) {}

    void operator()(const DiagnosticsRecord& r) {
        const double scale = std::max(1.0, r.total_energy);
        if (std::abs(r.mass - m0_) > 1e-12 * m0_) note("mass", r.t, r.mass);
        if (r.relative_energy < -1e-12 * scale) note("relative_energy", r.t, r.relative_energy);
        if (std::abs(r.relative_energy_form_delta) > 1e-12 * scale)
            note("relative_energy_form_delta", r.t, r.relative_energy_form_delta);
        if (r.entropy_production_integral < 0.0) note("entropy_production_integral", r.t, r.entropy_production_integral);
    }

private:
    void note(const char* what, double t, double v) {
        if (out_.size() >= 20) return;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s out of bounds at t = %.17g: %.17g", what, t, v);
        out_.push_back(buf);
    }
    double m0_;
    std::vector<std::string>& out_;
};

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg_in) {
    const auto wall0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = cfg_in;
    RunManifest man;
    man.version = NSF_VERSION;
    man.start_time = iso_now();
    const fs::path dir = cfg.output_dir;
    auto add_artifact = [&](const std::string& name) {
        man.artifacts.push_back({name, sha256_hex(read_file(dir / name))});
    };
    auto finish = [&]() {
        man.end_time = iso_now();
        man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        try {
            write_manifest((dir / "manifest.json").string(), man);
        } catch (const std::exception&) {
        }
        return man;
    };

    man.stage = "setup";
    try {
        fs::create_directories(dir);
        validate(cfg);
        man.warnings = cfg.warnings;
        const std::string text = canonical_text(cfg);
        write_file(dir / "config.txt", text);
        man.config_hash = sha256_hex(text);
        add_artifact("config.txt");
    } catch (const ConfigError& e) {
        man.status = RunStatus::ConfigError;
        man.message = std::string(to_string(e.code())) + ": " + e.what();
        return finish();
    } catch (const std::exception& e) {
        man.status = RunStatus::SolverFailure;
        man.message = e.what();
        return finish();
    }

    try {
        man.stage = "models";
        const HypothesisReport rep = validate_hypotheses(cfg.gas, default_validation_grid(cfg.gas));
        write_file(dir / "hypotheses.txt", rep.to_key_value());
        add_artifact("hypotheses.txt");
        if (!rep.all_pass()) man.violations.push_back("constitutive hypotheses failed; see hypotheses.txt");

        man.stage = "stationary";
        const Discretization disc = make_discretization(cfg);
        const Grid& grid = disc.grid();
        const StationaryState st = solve_stationary(cfg.problem, disc, cfg.stationary_method);
        write_snapshot((dir / "stationary.snap").string(), grid, st.fields);
        add_artifact("stationary.snap");

        man.stage = "initial";
        const FluidState init = perturb(cfg, disc, st.fields);
        write_snapshot((dir / "initial.snap").string(), grid, init);
        add_artifact("initial.snap");

        man.stage = "metadata";
        const Thresholds th = Thresholds::defaults(st.fields);
        {
            std::ofstream meta(dir / "metadata.jsonl", std::ios::binary);
            const auto line = [&](const json& j) { meta << j.dump() << '\n'; };
            line({{"kind", "toolkit"}, {"version", NSF_VERSION}, {"preset", cfg.preset}, {"seed", cfg.seed}});
            line({{"kind", "grid"},
                  {"dimension", grid.dimension},
                  {"nx", grid.nx},
                  {"nz", grid.nz},
                  {"lx", grid.lx},
                  {"x0", grid.x0},
                  {"reconstruction", to_string(cfg.reconstruction)}});
            line({{"kind", "models"},
                  {"p_inf", cfg.gas.p_inf},
                  {"a", cfg.gas.a},
                  {"pm_family", to_string(cfg.gas.pm_family)},
                  {"pm_gain", cfg.gas.pm_gain},
                  {"mu0", cfg.transport.mu0},
                  {"eta0", cfg.transport.eta0},
                  {"kappa0", cfg.transport.kappa0},
                  {"beta", cfg.transport.beta}});
            line({{"kind", "problem"},
                  {"m0", cfg.problem.m0},
                  {"theta_bottom", cfg.problem.theta_bottom},
                  {"theta_top", cfg.problem.theta_top},
                  {"lateral_amplitude", cfg.problem.lateral_amplitude},
                  {"gx", cfg.problem.gx},
                  {"gz", cfg.problem.gz},
                  {"epsilon", epsilon_report(cfg.problem, grid)},
                  {"data_norm", data_norm(cfg.problem, grid)}});
            line({{"kind", "thresholds"},
                  {"theta_low", th.theta_low},
                  {"theta_high", th.theta_high},
                  {"rho_low", th.rho_low},
                  {"rho_high", th.rho_high}});
            line({{"kind", "stationary"},
                  {"method", cfg.stationary_method},
                  {"iterations", st.iterations},
                  {"residual_continuity", st.residual_continuity},
                  {"residual_momentum", st.residual_momentum},
                  {"residual_energy", st.residual_energy},
                  {"mass_error", st.mass_error},
                  {"proximity", proximity_json(st.proximity)}});
            line({{"kind", "perturbation"},
                  {"family", cfg.perturbation},
                  {"amplitude", cfg.amplitude},
                  {"modes", cfg.modes}});
            line({{"kind", "columns"}, {"names", DiagnosticsRecord::columns()}});
            if (!meta) throw std::runtime_error("cannot write metadata.jsonl");
        }
        add_artifact("metadata.jsonl");

        man.stage = "simulate";
        std::ofstream csv(dir / "diagnostics.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open diagnostics.csv");
        write_csv_header(csv);
        RecordChecker checker(cfg.problem.m0, man.violations);
        int snap_no = 0;
        std::vector<std::string> snaps;
        RunSinks sinks;
        sinks.on_record = [&](const DiagnosticsRecord& r) {
            write_csv_row(csv, r);
            if (!csv) throw std::runtime_error("write to diagnostics.csv failed");
            checker(r);
        };
        if (cfg.snapshot_interval > 0.0) {
            sinks.on_snapshot = [&](const FluidState& s) {
                char name[32];
                std::snprintf(name, sizeof name, "snapshot_%04d.snap", snap_no++);
                write_snapshot((dir / name).string(), grid, s);
                snaps.push_back(name);
            };
        }
        RunOptions opt;
        opt.horizon = cfg.horizon;
        opt.control = cfg.control;
        opt.record_interval = cfg.record_interval;
        opt.snapshot_interval = cfg.snapshot_interval;
        opt.thresholds = th;
        opt.max_steps = cfg.max_steps;
        RunSummary sum;
        try {
            sum = run(disc, init, st, opt, sinks);
        } catch (...) {
            csv.close();
            add_artifact("diagnostics.csv");
            for (const auto& s : snaps) add_artifact(s);
            throw;
        }
        csv.close();
        add_artifact("diagnostics.csv");
        for (const auto& s : snaps) add_artifact(s);
        man.steps = sum.steps;
        man.retries = sum.retries;

        man.stage = "finalize";
        write_snapshot((dir / "final.snap").string(), grid, sum.final_state);
        add_artifact("final.snap");
        man.status = man.violations.empty() ? RunStatus::Ok : RunStatus::InvariantViolation;
        man.stage = "done";
    } catch (const PositivityError& e) {
        man.status = RunStatus::SolverFailure;
        man.message = std::string("positivity failure: ") + e.what();
    } catch (const std::exception& e) {
        man.status = RunStatus::SolverFailure;
        man.message = e.what();
    }
    return finish();
}

// --- compare -------------------------------------------------------------------------------------

const ColumnDeviation& CompareReport::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.column == name) return c;
    throw DomainError("no column '" + name + "' in the report");
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    if (!std::getline(in, line)) throw DomainError(path + ": empty CSV");
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != header.size()) throw DomainError(path + ": ragged row");
        rows.push_back(std::move(row));
    }
    return {header, rows};
}

CompareReport compare_csv(const std::string& csv_a, const std::string& csv_b) {
    const auto [ha, ra] = read_csv(csv_a);
    const auto [hb, rb] = read_csv(csv_b);
    if (ha != hb) throw DomainError("column schemas differ between " + csv_a + " and " + csv_b);
    if (ra.size() != rb.size()) throw DomainError("row counts differ between " + csv_a + " and " + csv_b);
    CompareReport rep;
    rep.rows = ra.size();
    for (std::size_t c = 0; c < ha.size(); ++c) {
        ColumnDeviation d;
        d.column = ha[c];
        double scale = 0.0;
        for (std::size_t r = 0; r < ra.size(); ++r) {
            d.max_abs = std::max(d.max_abs, std::abs(ra[r][c] - rb[r][c]));
            scale = std::max({scale, std::abs(ra[r][c]), std::abs(rb[r][c])});
        }
        d.max_rel = scale > 0.0 ? d.max_abs / scale : 0.0;
        rep.columns.push_back(d);
    }
    return rep;
}

CompareReport compare_runs(const std::string& manifest_a, const std::string& manifest_b) {
    auto csv_of = [](const std::string& m) {
        const RunManifest man = read_manifest(m);
        for (const auto& a : man.artifacts)
            if (a.path == "diagnostics.csv") return (fs::path(m).parent_path() / a.path).string();
        throw DomainError("manifest " + m + " lists no diagnostics.csv");
    };
    return compare_csv(csv_of(manifest_a), csv_of(manifest_b));
}

// --- sweep ---------------------------------------------------------------------------------------

std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::string& key,
                              const std::vector<std::string>& values, bool stationary_only) {
    std::vector<SweepPoint> out;
    const fs::path root = base.output_dir;
    fs::create_directories(root);
    for (const auto& v : values) {
        ExperimentConfig cfg = base;
        set_config_value(cfg, key, v);
        cfg.output_dir = (root / (key + "=" + v)).string();
        if (stationary_only) cfg.horizon = 0.0;
        validate(cfg);
        SweepPoint pt;
        pt.value = v;
        pt.output_dir = cfg.output_dir;
        const RunManifest man = run_experiment(cfg);
        pt.status = man.status;
        if (man.status == RunStatus::Ok || man.status == RunStatus::InvariantViolation) {
            const Snapshot snap = read_snapshot((fs::path(cfg.output_dir) / "stationary.snap").string());
            pt.proximity = proximity(cfg.problem, snap.grid, snap.state);
            pt.epsilon = pt.proximity.epsilon;
            const auto [h, rows] = read_csv((fs::path(cfg.output_dir) / "diagnostics.csv").string());
            const auto col = std::find(h.begin(), h.end(), "relative_energy") - h.begin();
            if (!rows.empty()) pt.final_relative_energy = rows.back()[static_cast<std::size_t>(col)];
        }
        out.push_back(pt);
    }
    std::ofstream csv(root / "sweep.csv", std::ios::binary);
    csv << key << ",epsilon,rho_dev,theta_dev,u_dev,final_relative_energy,status\n";
    char buf[256];
    for (const auto& p : out) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", p.value.c_str(), p.epsilon,
                      p.proximity.rho_dev, p.proximity.theta_dev, p.proximity.u_dev, p.final_relative_energy,
                      to_string(p.status).c_str());
        csv << buf;
    }
    return out;
}

}  // namespace nsf
