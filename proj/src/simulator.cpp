#include "nsf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "nsf/errors.hpp"

namespace nsf {

void StepControl::check() const {
    if (!(cfl_target > 0.0 && cfl_target < 1.0))
        throw DomainError("cfl_target must lie in (0, 1), got " + std::to_string(cfl_target));
    if (!(dt_min > 0.0 && dt_min < dt_max))
        throw DomainError("step bounds must satisfy 0 < dt_min < dt_max");
    if (max_retries < 0) throw DomainError("max_retries must be nonnegative");
}

double cfl_dt(const Discretization& d, const FluidState& s, const StepControl& control) {
    const Grid& g = d.grid();
    s.check_shape(g);
    const auto& gas = d.models().gas;
    double dt = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto c = g.cell(i, k);
            const double cs = sound_speed(gas, s.rho[c], s.theta[c]);
            const double uc = std::max(std::abs(s.u[g.x_face(i, k)]), std::abs(s.u[g.x_face(i + 1, k)]));
            const double wb = k > 0 ? std::abs(s.w[g.z_face(i, k)]) : 0.0;
            const double wt = k + 1 < g.nz ? std::abs(s.w[g.z_face(i, k + 1)]) : 0.0;
            const double wc = std::max(wb, wt);
            if (g.nx == 1) {
                dt = std::min(dt, g.dz() / (std::max(uc, wc) + cs));
            } else {
                dt = std::min(dt, g.dx() / (uc + cs));
                dt = std::min(dt, g.dz() / (wc + cs));
            }
        }
    }
    return std::clamp(control.cfl_target * dt, control.dt_min, control.dt_max);
}

namespace {

using Vec = Eigen::VectorXd;
using ConstMap = Eigen::Map<const Vec>;

SparseMatrix diagonal_plus(const Field& diag, double scale, const SparseMatrix& a) {
    const auto n = static_cast<Eigen::Index>(diag.size());
    SparseMatrix dm(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(diag.size());
    for (Eigen::Index r = 0; r < n; ++r) trip.emplace_back(r, r, diag[static_cast<std::size_t>(r)]);
    dm.setFromTriplets(trip.begin(), trip.end());
    SparseMatrix out = dm + scale * a;
    out.makeCompressed();
    return out;
}

// Solves rho' e(rho', theta(K)) + dt (L K - b) = e_star for the Kirchhoff field K.
Field implicit_heat(const Discretization& d, const Field& rho, const Field& theta0, const Field& e_star, double dt,
                    const HeatSolveOptions& opt, StepStats* stats) {
    const auto& gas = d.models().gas;
    const auto& tr = d.models().transport;
    const std::size_t n = rho.size();
    double scale = 1.0;
    for (double v : e_star) scale = std::max(scale, std::abs(v));
    const double tol = opt.tol * scale;

    Field kc = d.kirchhoff_field(theta0);
    Field theta = theta0;
    const SparseMatrix& lap = d.heat_matrix();
    const ConstMap b(d.heat_boundary().data(), static_cast<Eigen::Index>(n));

    auto residual = [&](const Field& k, const Field& th) {
        Vec r = dt * (lap * ConstMap(k.data(), static_cast<Eigen::Index>(n)) - b);
        for (std::size_t c = 0; c < n; ++c)
            r[static_cast<Eigen::Index>(c)] += rho[c] * internal_energy(gas, rho[c], th[c]) - e_star[c];
        return r;
    };

    Vec r = residual(kc, theta);
    double norm = r.lpNorm<Eigen::Infinity>();
    std::vector<double> trace{norm};
    Eigen::SimplicialLDLT<SparseMatrix> solver;
    bool analyzed = false;
    int it = 0;
    while (norm > tol) {
        if (it == opt.max_iter) {
            std::ostringstream os;
            os << "implicit heat solve did not converge in " << opt.max_iter << " iterations (residual " << norm
               << ", tolerance " << tol << ")";
            throw SolverError(os.str(), trace);
        }
        Field diag(n);
        for (std::size_t c = 0; c < n; ++c)
            diag[c] = rho[c] * energy_partial_theta(gas, rho[c], theta[c]) / conductivity(tr, theta[c]);
        const SparseMatrix jac = diagonal_plus(diag, dt, lap);
        if (!analyzed) {
            solver.analyzePattern(jac);
            analyzed = true;
        }
        solver.factorize(jac);
        if (solver.info() != Eigen::Success) throw SolverError("heat Jacobian factorization failed", trace);
        const Vec dk = solver.solve(-r);

        double alpha = 1.0;
        Field k_trial(n), th_trial(n);
        for (;;) {
            std::size_t bad = n;
            for (std::size_t c = 0; c < n && bad == n; ++c) {
                k_trial[c] = kc[c] + alpha * dk[static_cast<Eigen::Index>(c)];
                if (!(k_trial[c] > 0.0)) bad = c;
            }
            if (bad == n) break;
            alpha *= 0.5;
            if (alpha < 1e-12) throw PositivityError(PositivityError::Field::Temperature, bad, k_trial[bad]);
        }
        for (std::size_t c = 0; c < n; ++c) th_trial[c] = kirchhoff_inverse(tr, k_trial[c]);
        kc.swap(k_trial);
        theta.swap(th_trial);
        r = residual(kc, theta);
        norm = r.lpNorm<Eigen::Infinity>();
        trace.push_back(norm);
        ++it;
    }
    if (stats) {
        stats->heat_iterations = it;
        stats->heat_residual = norm;
    }
    return theta;
}

}  // namespace

FluidState step(const Discretization& d, const FluidState& s, double dt, StepStats* stats,
                const HeatSolveOptions& heat) {
    const Grid& g = d.grid();
    s.check_shape(g);
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const std::size_t n = g.cells();

    // continuity
    const MassFlux flux = d.mass_flux(s);
    const Field div_f = d.divergence(flux);
    FluidState out;
    out.t = s.t + dt;
    out.rho.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        out.rho[c] = s.rho[c] - dt * div_f[c];
        if (!(out.rho[c] > 0.0)) throw PositivityError(PositivityError::Field::Density, c, out.rho[c]);
    }

    // internal energy
    const Field e = d.energy_field(s.rho, s.theta);
    const Field p = d.pressure_field(s.rho, s.theta);
    const Field conv = d.transport_divergence(flux, e);
    const Field sd = d.dissipation(s, s.theta);
    const Field du = d.velocity_divergence(s);
    Field e_star(n);
    for (std::size_t c = 0; c < n; ++c) e_star[c] = s.rho[c] * e[c] - dt * (conv[c] - sd[c] + p[c] * du[c]);
    out.theta = implicit_heat(d, out.rho, s.theta, e_star, dt, heat, stats);

    // momentum
    const Field rho_f = d.face_density(out.rho);
    const Field p_new = d.pressure_field(out.rho, out.theta);
    const Field forces = d.momentum_forces(s, out.rho, p_new);
    const Field v = d.pack_velocity(s);
    const auto m = static_cast<Eigen::Index>(v.size());
    Vec rhs(m);
    for (Eigen::Index f = 0; f < m; ++f) {
        const auto fi = static_cast<std::size_t>(f);
        rhs[f] = rho_f[fi] * v[fi] + dt * forces[fi];
    }
    const SparseMatrix mat = diagonal_plus(rho_f, -dt, d.viscous_matrix(s.theta));
    Eigen::SimplicialLDLT<SparseMatrix> solver(mat);
    if (solver.info() != Eigen::Success) throw SolverError("momentum matrix factorization failed");
    const Vec v_new = solver.solve(rhs);
    if (!v_new.allFinite()) throw SolverError("momentum solve produced non-finite velocities");
    d.unpack_velocity(Field(v_new.data(), v_new.data() + m), out);
    return out;
}

namespace {

struct Rates {
    double sigma = 0.0;
    double flux = 0.0;
    double ballistic = 0.0;
};

Rates rates(const Discretization& d, const FluidState& s, const FluidState& ref) {
    return {entropy_production(d, s).integral, boundary_entropy_flux(d, s), ballistic_source(d, s, ref)};
}

}  // namespace

RunSummary run(const Discretization& d, const FluidState& initial, const StationaryState& reference,
               const RunOptions& options, const RunSinks& sinks) {
    const auto wall0 = std::chrono::steady_clock::now();
    const Grid& g = d.grid();
    initial.check_shape(g);
    reference.fields.check_shape(g);
    options.control.check();
    if (!(options.horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
    const FluidState& ref = reference.fields;
    const Thresholds th = options.thresholds ? *options.thresholds : Thresholds::defaults(ref);
    th.check(ref);

    RunSummary sum;
    FluidState s = initial;
    const double t0 = s.t, t_end = t0 + options.horizon;
    double int_sigma = 0.0, int_flux = 0.0, int_bal = 0.0, last_dt = 0.0;

    auto emit_record = [&]() {
        DiagnosticsRecord r = evaluate_record(d, s, ref, th);
        r.entropy_production_time_integral = int_sigma;
        r.boundary_entropy_flux_time_integral = int_flux;
        r.ballistic_source_time_integral = int_bal;
        r.steps = sum.steps;
        r.dt = last_dt;
        if (sinks.on_record) sinks.on_record(r);
        sum.records.push_back(r);
    };
    auto emit_snapshot = [&]() {
        if (sinks.on_snapshot) sinks.on_snapshot(s);
    };

    emit_record();
    emit_snapshot();
    Rates now = rates(d, s, ref);

    auto next_after = [&](double interval, long count) {
        return interval > 0.0 ? std::min(t_end, t0 + static_cast<double>(count) * interval) : t_end;
    };
    long n_rec = 1, n_snap = 1;
    double next_rec = next_after(options.record_interval, n_rec);
    double next_snap = next_after(options.snapshot_interval, n_snap);

    while (s.t < t_end) {
        const double target = std::min(next_rec, next_snap);
        double dt = options.control.adaptive ? cfl_dt(d, s, options.control) : options.control.dt_max;
        int tries = 0;
        FluidState next;
        for (;;) {
            const bool landing = target - s.t <= dt * (1.0 + 1e-9);
            const double h = landing ? target - s.t : dt;
            try {
                next = step(d, s, h);
                if (landing) next.t = target;
                last_dt = h;
                break;
            } catch (const PositivityError&) {
                if (tries >= options.control.max_retries || 0.5 * dt < options.control.dt_min) throw;
            } catch (const SolverError&) {
                if (tries >= options.control.max_retries || 0.5 * dt < options.control.dt_min) throw;
            }
            ++tries;
            ++sum.retries;
            dt = 0.5 * std::min(dt, target - s.t);
        }
        s = std::move(next);
        ++sum.steps;
        const Rates after = rates(d, s, ref);
        int_sigma += 0.5 * (now.sigma + after.sigma) * last_dt;
        int_flux += 0.5 * (now.flux + after.flux) * last_dt;
        int_bal += 0.5 * (now.ballistic + after.ballistic) * last_dt;
        now = after;

        if (s.t == next_rec) {
            emit_record();
            next_rec = next_after(options.record_interval, ++n_rec);
        }
        if (s.t == next_snap) {
            if (s.t < t_end) emit_snapshot();
            next_snap = next_after(options.snapshot_interval, ++n_snap);
        }
        if (options.max_steps > 0 && sum.steps >= options.max_steps && s.t < t_end) {
            std::ostringstream os;
            os << "step budget of " << options.max_steps << " exhausted at t = " << s.t;
            throw SolverError(os.str());
        }
    }
    if (options.horizon > 0.0) emit_snapshot();
    sum.final_state = s;
    sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return sum;
}

}  // namespace nsf
