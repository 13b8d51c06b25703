#include "nsf/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

Proximity proximity(const ProblemConfig& cfg, const Grid& grid, const FluidState& s) {
    Proximity p;
    const double rho_bar = cfg.m0 / grid.volume();
    const double theta_bar = mean_boundary_temperature(boundary_data(cfg, grid));
    for (double r : s.rho) p.rho_dev = std::max(p.rho_dev, std::abs(r - rho_bar));
    for (double t : s.theta) p.theta_dev = std::max(p.theta_dev, std::abs(t - theta_bar));
    p.u_dev = std::max(max_abs(s.u), max_abs(s.w));
    p.epsilon = epsilon_report(cfg, grid);
    p.ratio = p.epsilon > 0.0 ? (p.rho_dev + p.theta_dev + p.u_dev) / p.epsilon : 0.0;
    return p;
}

void evaluate_residuals(const Discretization& disc, double m0, StationaryState& st) {
    auto r = disc.stationary_residual(st.fields, 0.0);
    st.residual_continuity = max_abs(r.continuity);
    st.residual_momentum = max_abs(r.momentum);
    st.residual_energy = max_abs(r.energy);
    st.mass_error = std::abs(disc.total_mass(st.fields.rho) - m0);
}

StationaryState static_uniform(const ProblemConfig& cfg, const Grid& grid, const Models& models) {
    cfg.check(grid);
    if (!is_static(cfg, grid))
        throw ProblemError("static solution requires a constant wall temperature and a constant potential");
    const auto bc = boundary_data(cfg, grid);
    StationaryState st;
    st.fields = FluidState::uniform(grid, cfg.m0 / grid.volume(), bc.theta_bottom.front());
    Discretization disc(grid, models, bc, potential(cfg, grid));
    evaluate_residuals(disc, cfg.m0, st);
    st.proximity = proximity(cfg, grid, st.fields);
    return st;
}

Field solve_heat_profile_1d(const TransportModel& t, double theta_bottom, double theta_top,
                            const std::vector<double>& z) {
    if (!(theta_bottom > 0.0) || !(theta_top > 0.0)) throw ProblemError("plate temperatures must be positive");
    const double kb = kirchhoff(t, theta_bottom), ku = kirchhoff(t, theta_top);
    Field out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] <= 0.0) {
            out[i] = theta_bottom;
        } else if (z[i] >= 1.0) {
            out[i] = theta_top;
        } else {
            out[i] = kirchhoff_inverse(t, (1.0 - z[i]) * kb + z[i] * ku);
        }
    }
    return out;
}

Field solve_heat_profile(const TransportModel& t, double theta_bottom, double theta_top, const Grid& grid) {
    std::vector<double> z(static_cast<std::size_t>(grid.nz));
    for (int k = 0; k < grid.nz; ++k) z[static_cast<std::size_t>(k)] = grid.z_center(k);
    auto col = solve_heat_profile_1d(t, theta_bottom, theta_top, z);
    Field out(grid.cells());
    for (int k = 0; k < grid.nz; ++k)
        for (int i = 0; i < grid.nx; ++i) out[grid.cell(i, k)] = col[static_cast<std::size_t>(k)];
    return out;
}

Field solve_hydrostatic_density(const GasModel& gas, const TransportModel& t, double theta_bottom,
                                double theta_top, double g, double m0, const Grid& grid,
                                const HydrostaticOptions& opt) {
    if (!(theta_bottom > 0.0) || !(theta_top > 0.0)) throw ProblemError("plate temperatures must be positive");
    const double kb = kirchhoff(t, theta_bottom), ku = kirchhoff(t, theta_top);
    auto theta = [&](double z) { return kirchhoff_inverse(t, (1.0 - z) * kb + z * ku); };
    auto dtheta = [&](double z) { return (ku - kb) / conductivity(t, theta(z)); };
    Grid col = Grid::column(grid.nz);
    auto rho = solve_hydrostatic_density(gas, theta, dtheta, g, m0 / grid.volume(), col, opt);
    Field out(grid.cells());
    for (int k = 0; k < grid.nz; ++k)
        for (int i = 0; i < grid.nx; ++i) out[grid.cell(i, k)] = rho[static_cast<std::size_t>(k)];
    return out;
}

StationaryState solve_layered_pipeline(const ProblemConfig& cfg, const Grid& grid, const Models& models,
                                       const HydrostaticOptions& opt) {
    cfg.check(grid);
    if (!is_layered(cfg, grid))
        throw ProblemError("the layered pipeline needs a vertical potential and x-independent plate temperatures");
    const auto bc = boundary_data(cfg, grid);
    const double tb = bc.theta_bottom.front(), tu = bc.theta_top.front();
    StationaryState st;
    st.fields = FluidState::uniform(grid, 1.0, 1.0);
    st.fields.theta = solve_heat_profile(models.transport, tb, tu, grid);
    st.fields.rho = solve_hydrostatic_density(models.gas, models.transport, tb, tu, cfg.gz, cfg.m0, grid, opt);
    Discretization disc(grid, models, bc, potential(cfg, grid));
    evaluate_residuals(disc, cfg.m0, st);
    st.proximity = proximity(cfg, grid, st.fields);
    return st;
}

namespace {

struct NewtonSystem {
    const Discretization& disc;
    double m0;
    std::size_t n, nv;

    std::size_t size() const { return 2 * n + nv + 1; }

    Eigen::VectorXd pack(const FluidState& s, double lambda) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(size()));
        auto v = disc.pack_velocity(s);
        for (std::size_t c = 0; c < n; ++c) {
            x[static_cast<Eigen::Index>(c)] = s.rho[c];
            x[static_cast<Eigen::Index>(n + c)] = s.theta[c];
        }
        for (std::size_t f = 0; f < nv; ++f) x[static_cast<Eigen::Index>(2 * n + f)] = v[f];
        x[static_cast<Eigen::Index>(size() - 1)] = lambda;
        return x;
    }

    FluidState unpack(const Eigen::VectorXd& x) const {
        FluidState s;
        s.rho.resize(n);
        s.theta.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            s.rho[c] = x[static_cast<Eigen::Index>(c)];
            s.theta[c] = x[static_cast<Eigen::Index>(n + c)];
        }
        Field v(nv);
        for (std::size_t f = 0; f < nv; ++f) v[f] = x[static_cast<Eigen::Index>(2 * n + f)];
        disc.unpack_velocity(v, s);
        return s;
    }

    /// Index of the first nonpositive density or temperature, or -1.
    long nonpositive(const Eigen::VectorXd& x) const {
        for (std::size_t c = 0; c < 2 * n; ++c)
            if (!(x[static_cast<Eigen::Index>(c)] > 0.0)) return static_cast<long>(c);
        return -1;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const FluidState s = unpack(x);
        const auto r = disc.stationary_residual(s, x[static_cast<Eigen::Index>(size() - 1)]);
        Eigen::VectorXd f(static_cast<Eigen::Index>(size()));
        for (std::size_t c = 0; c < n; ++c) {
            f[static_cast<Eigen::Index>(c)] = r.continuity[c];
            f[static_cast<Eigen::Index>(n + c)] = r.energy[c];
        }
        for (std::size_t k = 0; k < nv; ++k) f[static_cast<Eigen::Index>(2 * n + k)] = r.momentum[k];
        f[static_cast<Eigen::Index>(size() - 1)] = disc.total_mass(s.rho) - m0;
        return f;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& f0, double step) const {
        const auto m = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd j(m, m);
        Eigen::VectorXd xp = x;
        for (Eigen::Index c = 0; c < m; ++c) {
            const double h = step * std::max(1.0, std::abs(x[c]));
            xp[c] = x[c] + h;
            const double hh = xp[c] - x[c];
            j.col(c) = (residual(xp) - f0) / hh;
            xp[c] = x[c];
        }
        return j;
    }
};

}  // namespace

StationaryState solve_stationary_newton(const ProblemConfig& cfg, const Discretization& disc,
                                        const FluidState& initial_guess, const NewtonOptions& opt) {
    const Grid& grid = disc.grid();
    cfg.check(grid);
    initial_guess.check_shape(grid);
    NewtonSystem sys{disc, cfg.m0, grid.cells(), disc.velocity_size()};
    Eigen::VectorXd x = sys.pack(initial_guess, 0.0);
    if (long bad = sys.nonpositive(x); bad >= 0) {
        const bool dens = bad < static_cast<long>(sys.n);
        throw PositivityError(dens ? PositivityError::Field::Density : PositivityError::Field::Temperature,
                              static_cast<std::size_t>(dens ? bad : bad - static_cast<long>(sys.n)),
                              x[bad]);
    }
    Eigen::VectorXd f = sys.residual(x);
    std::vector<double> trace{f.lpNorm<Eigen::Infinity>()};
    int iter = 0;
    bool converged = trace.back() < opt.tol;
    int polish_left = 3;
    while (iter < opt.max_iter) {
        if (trace.back() == 0.0 || (converged && polish_left-- <= 0)) break;
        const Eigen::MatrixXd j = sys.jacobian(x, f, opt.fd_step);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
        const Eigen::VectorXd dx = lu.solve(-f);
        if (!dx.allFinite()) throw SolverError("Newton direction is not finite (singular Jacobian)", trace);
        const double f_norm = f.norm();
        double alpha = 1.0;
        bool accepted = false, saw_positive = false;
        long last_bad = -1;
        Eigen::VectorXd x_trial, f_trial;
        while (alpha >= opt.min_step) {
            x_trial = x + alpha * dx;
            last_bad = sys.nonpositive(x_trial);
            if (last_bad < 0) {
                saw_positive = true;
                f_trial = sys.residual(x_trial);
                if (f_trial.allFinite() && f_trial.norm() <= (1.0 - 1e-4 * alpha) * f_norm) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        ++iter;
        if (!accepted) {
            if (converged) break;  // polishing hit rounding; keep the converged iterate
            if (!saw_positive) {
                const bool dens = last_bad < static_cast<long>(sys.n);
                throw PositivityError(dens ? PositivityError::Field::Density : PositivityError::Field::Temperature,
                                      static_cast<std::size_t>(dens ? last_bad : last_bad - static_cast<long>(sys.n)),
                                      x_trial[last_bad]);
            }
            std::ostringstream os;
            os << "Newton stagnated at iteration " << iter << " with residual " << trace.back()
               << " (line search reached the step floor)";
            throw SolverError(os.str(), trace);
        }
        const double before = trace.back();
        x = x_trial;
        f = f_trial;
        trace.push_back(f.lpNorm<Eigen::Infinity>());
        if (converged && trace.back() > opt.polish * before) break;
        converged = converged || trace.back() < opt.tol;
    }
    if (!converged) {
        std::ostringstream os;
        os << "Newton did not converge in " << opt.max_iter << " iterations (residual " << trace.back() << ")";
        throw SolverError(os.str(), trace);
    }
    StationaryState st;
    st.fields = sys.unpack(x);
    st.multiplier = x[static_cast<Eigen::Index>(sys.size() - 1)];
    st.iterations = iter;
    st.trace = trace;
    evaluate_residuals(disc, cfg.m0, st);
    st.proximity = proximity(cfg, grid, st.fields);
    return st;
}

StationaryState solve_stationary(const ProblemConfig& cfg, const Discretization& disc, const std::string& method) {
    const Grid& grid = disc.grid();
    const Models& models = disc.models();
    std::string how = method;
    if (how == "auto") how = is_static(cfg, grid) ? "static" : "newton";
    if (how == "static") return static_uniform(cfg, grid, models);
    if (how == "pipeline") return solve_layered_pipeline(cfg, grid, models);
    if (how != "newton") throw ProblemError("unknown stationary solver '" + method + "'");

    FluidState guess;
    if (is_layered(cfg, grid)) {
        guess = solve_layered_pipeline(cfg, grid, models).fields;
    } else {
        const auto bc = disc.boundary();
        double tb = 0.0, tu = 0.0;
        for (double v : bc.theta_bottom) tb += v;
        for (double v : bc.theta_top) tu += v;
        tb /= grid.nx;
        tu /= grid.nx;
        guess = FluidState::uniform(grid, cfg.m0 / grid.volume(), 1.0);
        guess.theta = solve_heat_profile(models.transport, tb, tu, grid);
    }
    return solve_stationary_newton(cfg, disc, guess);
}

}  // namespace nsf
