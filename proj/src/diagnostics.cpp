#include "nsf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

void require_same_grid(const Discretization& d, const FluidState& s) { s.check_shape(d.grid()); }

double min_of(const Field& f) { return *std::min_element(f.begin(), f.end()); }
double max_of(const Field& f) { return *std::max_element(f.begin(), f.end()); }

// Calls visit(cell_lo, cell_hi, delta, weight) for each face carrying a
// scalar gradient: x-faces (2-D only) and interior z-faces, weight = cell volume.
template <class Visit>
void for_each_interior_face(const Grid& g, Visit&& visit) {
    const double vol = g.cell_volume();
    if (g.nx > 1)
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) visit(g.cell(i - 1, k), g.cell(i, k), g.dx(), vol);
    for (int k = 1; k < g.nz; ++k)
        for (int i = 0; i < g.nx; ++i) visit(g.cell(i, k - 1), g.cell(i, k), g.dz(), vol);
}

}  // namespace

// --- thresholds -------------------------------------------------------------------

Thresholds Thresholds::defaults(const FluidState& ref) {
    Thresholds t;
    t.theta_low = 0.5 * min_of(ref.theta);
    t.theta_high = 2.0 * max_of(ref.theta);
    t.rho_low = 0.5 * min_of(ref.rho);
    t.rho_high = 2.0 * max_of(ref.rho);
    return t;
}

void Thresholds::check(const FluidState& ref) const {
    std::ostringstream os;
    if (!(theta_low > 0.0) || !(theta_low <= 0.5 * min_of(ref.theta)) || !(theta_high >= 2.0 * max_of(ref.theta)))
        os << "temperature thresholds (" << theta_low << ", " << theta_high
           << ") must satisfy 0 < low <= min/2 and high >= 2 max of the reference";
    else if (!(rho_low > 0.0) || !(rho_low <= 0.5 * min_of(ref.rho)) || !(rho_high >= 2.0 * max_of(ref.rho)))
        os << "density thresholds (" << rho_low << ", " << rho_high
           << ") must satisfy 0 < low <= min/2 and high >= 2 max of the reference";
    else
        return;
    throw DomainError(os.str());
}

// --- record layout -------------------------------------------------------------------

const std::vector<std::string>& DiagnosticsRecord::columns() {
    static const std::vector<std::string> cols = {
        "t",
        "steps",
        "dt",
        "mass",
        "total_energy",
        "relative_energy",
        "relative_energy_form_delta",
        "ballistic_energy",
        "entropy_production_integral",
        "norm_rho_53",
        "norm_momentum_54",
        "norm_theta_4",
        "u_h1_sq",
        "theta_h1_sq",
        "damping_mid",
        "damping_high",
        "damping_low",
        "kappa_weighted_grad_sq",
        "kappa_weighted_grad_diff_sq",
        "total_entropy",
        "entropy_production_time_integral",
        "boundary_entropy_flux_time_integral",
        "ballistic_source_time_integral",
    };
    return cols;
}

std::vector<double> DiagnosticsRecord::values() const {
    return {t,
            static_cast<double>(steps),
            dt,
            mass,
            total_energy,
            relative_energy,
            relative_energy_form_delta,
            ballistic_energy,
            entropy_production_integral,
            norm_rho_53,
            norm_momentum_54,
            norm_theta_4,
            u_h1_sq,
            theta_h1_sq,
            damping_mid,
            damping_high,
            damping_low,
            kappa_weighted_grad_sq,
            kappa_weighted_grad_diff_sq,
            total_entropy,
            entropy_production_time_integral,
            boundary_entropy_flux_time_integral,
            ballistic_source_time_integral};
}

void write_csv_header(std::ostream& os) {
    const auto& cols = DiagnosticsRecord::columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
    char buf[40];
    const auto v = r.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        os << (i ? "," : "") << buf;
    }
    os << '\n';
}

// --- energies ------------------------------------------------------------------------

double kinetic_energy(const Discretization& d, const FluidState& s, const FluidState* ref) {
    require_same_grid(d, s);
    const Field rf = d.face_density(s.rho);
    const Field v = d.pack_velocity(s);
    Field vr;
    if (ref) vr = d.pack_velocity(*ref);
    double sum = 0.0;
    for (std::size_t f = 0; f < v.size(); ++f) {
        const double dv = ref ? v[f] - vr[f] : v[f];
        sum += 0.5 * rf[f] * dv * dv;
    }
    return sum * d.face_volume();
}

double total_energy(const Discretization& d, const FluidState& s) {
    double th = 0.0;
    for (std::size_t c = 0; c < s.rho.size(); ++c) th += s.rho[c] * internal_energy(d.models().gas, s.rho[c], s.theta[c]);
    return kinetic_energy(d, s) + th * d.grid().cell_volume();
}

double total_entropy(const Discretization& d, const FluidState& s) {
    require_same_grid(d, s);
    double sum = 0.0;
    for (std::size_t c = 0; c < s.rho.size(); ++c) sum += s.rho[c] * entropy(d.models().gas, s.rho[c], s.theta[c]);
    return sum * d.grid().cell_volume();
}

double relative_energy_density(const GasModel& m, double rho, double theta, double rho_r, double theta_r) {
    const double e = internal_energy(m, rho, theta), s = entropy(m, rho, theta);
    const double er = internal_energy(m, rho_r, theta_r), sr = entropy(m, rho_r, theta_r);
    const double pr = pressure(m, rho_r, theta_r);
    return rho * e - theta_r * (rho * s - rho_r * sr) - (er - theta_r * sr + pr / rho_r) * (rho - rho_r) - rho_r * er;
}

double relative_energy_density_alt(const GasModel& m, double rho, double theta, double rho_r, double theta_r,
                                   double pressure_shift) {
    const double e = internal_energy(m, rho, theta), s = entropy(m, rho, theta);
    const double er = internal_energy(m, rho_r, theta_r), sr = entropy(m, rho_r, theta_r);
    const double pr = pressure(m, rho_r, theta_r) + pressure_shift;
    return rho * e - theta_r * rho * s - (er - theta_r * sr + pr / rho_r) * rho + pr;
}

double relative_energy(const Discretization& d, const FluidState& s, const FluidState& ref) {
    require_same_grid(d, s);
    require_same_grid(d, ref);
    double th = 0.0;
    for (std::size_t c = 0; c < s.rho.size(); ++c)
        th += relative_energy_density(d.models().gas, s.rho[c], s.theta[c], ref.rho[c], ref.theta[c]);
    return th * d.grid().cell_volume() + kinetic_energy(d, s, &ref);
}

double relative_energy_form_delta(const Discretization& d, const FluidState& s, const FluidState& ref,
                                  double pressure_shift) {
    require_same_grid(d, s);
    require_same_grid(d, ref);
    const auto& m = d.models().gas;
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
        a += relative_energy_density(m, s.rho[c], s.theta[c], ref.rho[c], ref.theta[c]);
        b += relative_energy_density_alt(m, s.rho[c], s.theta[c], ref.rho[c], ref.theta[c], pressure_shift);
    }
    return (a - b) * d.grid().cell_volume();
}

double ballistic_energy(const Discretization& d, const FluidState& s, const Field& theta_tilde, double trace_tol) {
    require_same_grid(d, s);
    const Grid& g = d.grid();
    if (theta_tilde.size() != g.cells()) throw DomainError("theta~ does not match the grid");
    for (double v : theta_tilde)
        if (!(v > 0.0)) throw DomainError("theta~ must be positive");
    for (int i = 0; i < g.nx; ++i) {
        const double bot = 1.5 * theta_tilde[g.cell(i, 0)] - 0.5 * theta_tilde[g.cell(i, 1)];
        const double top = 1.5 * theta_tilde[g.cell(i, g.nz - 1)] - 0.5 * theta_tilde[g.cell(i, g.nz - 2)];
        const double tb = d.boundary().theta_bottom[i], tu = d.boundary().theta_top[i];
        if (std::abs(bot - tb) > trace_tol * tb || std::abs(top - tu) > trace_tol * tu) {
            std::ostringstream os;
            os << "theta~ trace (" << bot << ", " << top << ") in column " << i << " does not match theta_B ("
               << tb << ", " << tu << ")";
            throw DomainError(os.str());
        }
    }
    const auto& m = d.models().gas;
    double sum = 0.0;
    for (std::size_t c = 0; c < s.rho.size(); ++c)
        sum += s.rho[c] * (internal_energy(m, s.rho[c], s.theta[c]) - theta_tilde[c] * entropy(m, s.rho[c], s.theta[c]));
    return sum * g.cell_volume() + kinetic_energy(d, s);
}

// --- entropy production -------------------------------------------------------------------

namespace {

// int q . grad(phi) on faces with the scheme's flux; wall faces use phi_B and a
// half-cell distance and count half a volume. add(cell, value) receives the
// per-cell share (already multiplied by volume).
template <class Phi, class Add>
void heat_face_pairing(const Discretization& d, const Field& kc, Phi&& phi, double phi_bottom_wall,
                       double phi_top_wall, bool wall_phi_is_boundary_reciprocal, Add&& add) {
    const Grid& g = d.grid();
    for_each_interior_face(g, [&](std::size_t lo, std::size_t hi, double delta, double vol) {
        const double q = -(kc[hi] - kc[lo]) / delta;
        const double v = q * (phi(hi) - phi(lo)) / delta * vol;
        add(lo, 0.5 * v);
        add(hi, 0.5 * v);
    });
    const double h = 0.5 * g.dz(), vol = 0.5 * g.cell_volume();
    for (int i = 0; i < g.nx; ++i) {
        const auto c0 = g.cell(i, 0), c1 = g.cell(i, g.nz - 1);
        const double pb = wall_phi_is_boundary_reciprocal ? 1.0 / d.boundary().theta_bottom[i] : phi_bottom_wall;
        const double pu = wall_phi_is_boundary_reciprocal ? 1.0 / d.boundary().theta_top[i] : phi_top_wall;
        const double qb = -(kc[c0] - d.k_bottom()[i]) / h;
        const double qu = -(d.k_top()[i] - kc[c1]) / h;
        add(c0, qb * (phi(c0) - pb) / h * vol);
        add(c1, qu * (pu - phi(c1)) / h * vol);
    }
}

}  // namespace

EntropyProduction entropy_production(const Discretization& d, const FluidState& s) {
    require_same_grid(d, s);
    const Grid& g = d.grid();
    EntropyProduction ep;
    ep.field.assign(g.cells(), 0.0);
    const Field sd = d.dissipation(s, s.theta);
    const double vol = g.cell_volume();
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double v = sd[c] / s.theta[c];
        ep.field[c] = v * vol;
        ep.viscous += v * vol;
    }
    const Field kc = d.kirchhoff_field(s.theta);
    heat_face_pairing(
        d, kc, [&](std::size_t c) { return 1.0 / s.theta[c]; }, 0.0, 0.0, true,
        [&](std::size_t c, double v) {
            ep.field[c] += v;
            ep.heat += v;
        });
    for (double& v : ep.field) v /= vol;
    ep.integral = ep.viscous + ep.heat;
    return ep;
}

double boundary_entropy_flux(const Discretization& d, const FluidState& s) {
    require_same_grid(d, s);
    const Grid& g = d.grid();
    const Field kc = d.kirchhoff_field(s.theta);
    const double h = 0.5 * g.dz();
    double out = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double qb = -(kc[g.cell(i, 0)] - d.k_bottom()[i]) / h;
        const double qu = -(d.k_top()[i] - kc[g.cell(i, g.nz - 1)]) / h;
        out += (-qb / d.boundary().theta_bottom[i] + qu / d.boundary().theta_top[i]) * g.dx();
    }
    return out;
}

double ballistic_source(const Discretization& d, const FluidState& s, const FluidState& ref) {
    require_same_grid(d, s);
    require_same_grid(d, ref);
    const Grid& g = d.grid();
    const auto& m = d.models().gas;
    const double vol = g.cell_volume();
    const auto nu = g.x_faces();
    const Field rf = d.face_density(s.rho);
    const Field v = d.pack_velocity(s);
    double src = 0.0;

    // gravity work and entropy transport against grad theta~, on velocity faces
    Field rs(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) rs[c] = s.rho[c] * entropy(m, s.rho[c], s.theta[c]);
    const Field& tt = ref.theta;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto f = g.x_face(i, k);
            const auto l = g.cell(i - 1, k), r = g.cell(i, k);
            src += rf[f] * d.potential().grad_x[f] * v[f] * vol;
            if (g.nx > 1) src -= 0.5 * (rs[l] + rs[r]) * v[f] * (tt[r] - tt[l]) / g.dx() * vol;
        }
    }
    for (int k = 1; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto f = nu + g.z_face(i, k);
            const auto b = g.cell(i, k - 1), t = g.cell(i, k);
            src += rf[f] * d.potential().grad_z[g.z_face(i, k)] * v[f] * vol;
            src -= 0.5 * (rs[b] + rs[t]) * v[f] * (tt[t] - tt[b]) / g.dz() * vol;
        }
    }
    const Field sd = d.dissipation(s, s.theta);
    for (std::size_t c = 0; c < g.cells(); ++c) src -= tt[c] / s.theta[c] * sd[c] * vol;
    const Field kc = d.kirchhoff_field(s.theta);
    heat_face_pairing(
        d, kc, [&](std::size_t c) { return tt[c] / s.theta[c]; }, 1.0, 1.0, false,
        [&](std::size_t, double val) { src -= val; });
    return src;
}

// --- norms, dissipation and damping -------------------------------------------------------------

AbsorbingNorms absorbing_norms(const Discretization& d, const FluidState& s) {
    require_same_grid(d, s);
    const Grid& g = d.grid();
    const double vol = g.cell_volume();
    double m54 = 0.0, r53 = 0.0, t4 = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto c = g.cell(i, k);
            const double uc = 0.5 * (s.u[g.x_face(i, k)] + s.u[g.x_face(i + 1, k)]);
            const double wb = k > 0 ? s.w[g.z_face(i, k)] : 0.0;
            const double wt = k + 1 < g.nz ? s.w[g.z_face(i, k + 1)] : 0.0;
            const double wc = 0.5 * (wb + wt);
            const double mom = s.rho[c] * std::hypot(uc, wc);
            m54 += std::pow(mom, 1.25);
            r53 += std::pow(s.rho[c], 5.0 / 3.0);
            t4 += std::pow(s.theta[c], 4.0);
        }
    }
    AbsorbingNorms n;
    n.norm_momentum_54 = std::pow(m54 * vol, 0.8);
    n.norm_rho_53 = std::pow(r53 * vol, 0.6);
    n.norm_theta_4 = std::pow(t4 * vol, 0.25);
    return n;
}

void temperature_gradient(const Discretization& d, const Field& theta, Field& gx, Field& gz) {
    const Grid& g = d.grid();
    gx.assign(g.cells(), 0.0);
    gz.assign(g.cells(), 0.0);
    const double dz = g.dz();
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto c = g.cell(i, k);
            if (g.nx > 1) gx[c] = (theta[g.cell(i + 1, k)] - theta[g.cell(i - 1, k)]) / (2.0 * g.dx());
            if (k == 0)
                gz[c] = (-4.0 * d.boundary().theta_bottom[i] + 3.0 * theta[c] + theta[g.cell(i, 1)]) / (3.0 * dz);
            else if (k == g.nz - 1)
                gz[c] = (4.0 * d.boundary().theta_top[i] - 3.0 * theta[c] - theta[g.cell(i, k - 1)]) / (3.0 * dz);
            else
                gz[c] = (theta[g.cell(i, k + 1)] - theta[g.cell(i, k - 1)]) / (2.0 * dz);
        }
    }
}

std::array<double, 4> kappa_weighted_partition(const Discretization& d, const FluidState& s, const Thresholds& th) {
    require_same_grid(d, s);
    Field gx, gz;
    temperature_gradient(d, s.theta, gx, gz);
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    const double vol = d.grid().cell_volume();
    for (std::size_t c = 0; c < s.theta.size(); ++c) {
        const double t = s.theta[c];
        const double v = conductivity(d.models().transport, t) / (t * t) * (gx[c] * gx[c] + gz[c] * gz[c]) * vol;
        if (t >= th.theta_high)
            out[0] += v;
        else if (t <= th.theta_low)
            out[2] += v;
        else
            out[1] += v;
        out[3] += v;
    }
    return out;
}

DissipationFunctionals dissipation_functionals(const Discretization& d, const FluidState& s, const FluidState& ref,
                                               const Thresholds& th) {
    require_same_grid(d, s);
    require_same_grid(d, ref);
    th.check(ref);
    const Grid& g = d.grid();
    const double vol = g.cell_volume();
    DissipationFunctionals out;

    // velocity difference, W^{1,2} on the staggered layout
    FluidState dv = s;
    for (std::size_t f = 0; f < dv.u.size(); ++f) dv.u[f] -= ref.u[f];
    for (std::size_t f = 0; f < dv.w.size(); ++f) dv.w[f] -= ref.w[f];
    double l2 = 0.0, grad = 0.0;
    for (double v : dv.u) l2 += v * v;
    for (double v : dv.w) l2 += v * v;
    auto w_at = [&](int i, int k) { return (k <= 0 || k >= g.nz) ? 0.0 : dv.w[g.z_face(i, k)]; };
    auto u_at = [&](int i, int k) {
        if (k < 0) return -dv.u[g.x_face(i, 0)];
        if (k >= g.nz) return -dv.u[g.x_face(i, g.nz - 1)];
        return dv.u[g.x_face(i, k)];
    };
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const double dudx = g.nx > 1 ? (dv.u[g.x_face(i + 1, k)] - dv.u[g.x_face(i, k)]) / g.dx() : 0.0;
            const double dwdz = (w_at(i, k + 1) - w_at(i, k)) / g.dz();
            grad += dudx * dudx + dwdz * dwdz;
        }
    }
    for (int k = 0; k <= g.nz; ++k) {
        const double wt = (k == 0 || k == g.nz) ? 0.5 : 1.0;
        for (int i = 0; i < g.nx; ++i) {
            const double dudz = (u_at(i, k) - u_at(i, k - 1)) / g.dz();
            const double dwdx = g.nx > 1 ? (w_at(i, k) - w_at(i - 1, k)) / g.dx() : 0.0;
            grad += wt * (dudz * dudz + dwdx * dwdx);
        }
    }
    out.u_h1_sq = (l2 + grad) * vol;

    // temperature difference, zero trace on the walls
    l2 = 0.0;
    grad = 0.0;
    Field dt(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        dt[c] = s.theta[c] - ref.theta[c];
        l2 += dt[c] * dt[c];
    }
    for_each_interior_face(g, [&](std::size_t lo, std::size_t hi, double delta, double) {
        const double q = (dt[hi] - dt[lo]) / delta;
        grad += q * q;
    });
    for (int i = 0; i < g.nx; ++i) {
        const double qb = dt[g.cell(i, 0)] / (0.5 * g.dz()), qu = dt[g.cell(i, g.nz - 1)] / (0.5 * g.dz());
        grad += 0.5 * (qb * qb + qu * qu);
    }
    out.theta_h1_sq = (l2 + grad) * vol;

    const auto part = kappa_weighted_partition(d, s, th);
    out.kappa_weighted_grad_sq = part[0] + part[2];

    Field gx, gz, rx, rz;
    temperature_gradient(d, s.theta, gx, gz);
    temperature_gradient(d, ref.theta, rx, rz);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double t = s.theta[c];
        if (t < th.theta_low) continue;
        const double ax = gx[c] - rx[c], az = gz[c] - rz[c];
        out.kappa_weighted_grad_diff_sq += conductivity(d.models().transport, t) / (t * t) * (ax * ax + az * az) * vol;
    }
    return out;
}

DampingFunctionals damping_functionals(const Discretization& d, const FluidState& s, const FluidState& ref,
                                       const Thresholds& th) {
    require_same_grid(d, s);
    require_same_grid(d, ref);
    th.check(ref);
    const double vol = d.grid().cell_volume();
    DampingFunctionals out;
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
        const double r = s.rho[c];
        if (r > th.rho_high)
            out.high += std::pow(r, 5.0 / 3.0) * vol;
        else if (r < th.rho_low)
            out.low += vol;
        else
            out.mid += (r - ref.rho[c]) * (r - ref.rho[c]) * vol;
    }
    return out;
}

std::array<double, 3> damping_region_measures(const Discretization& d, const FluidState& s, const Thresholds& th) {
    require_same_grid(d, s);
    const double vol = d.grid().cell_volume();
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (double r : s.rho) {
        if (r > th.rho_high)
            out[1] += vol;
        else if (r < th.rho_low)
            out[2] += vol;
        else
            out[0] += vol;
    }
    return out;
}

// --- records -------------------------------------------------------------------------------------

DiagnosticsRecord evaluate_record(const Discretization& d, const FluidState& s, const FluidState& ref,
                                  const Thresholds& th) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = d.total_mass(s.rho);
    r.total_energy = total_energy(d, s);
    r.relative_energy = relative_energy(d, s, ref);
    r.relative_energy_form_delta = relative_energy_form_delta(d, s, ref);
    r.ballistic_energy = ballistic_energy(d, s, ref.theta, 1.0);
    r.entropy_production_integral = entropy_production(d, s).integral;
    const auto n = absorbing_norms(d, s);
    r.norm_rho_53 = n.norm_rho_53;
    r.norm_momentum_54 = n.norm_momentum_54;
    r.norm_theta_4 = n.norm_theta_4;
    const auto df = dissipation_functionals(d, s, ref, th);
    r.u_h1_sq = df.u_h1_sq;
    r.theta_h1_sq = df.theta_h1_sq;
    r.kappa_weighted_grad_sq = df.kappa_weighted_grad_sq;
    r.kappa_weighted_grad_diff_sq = df.kappa_weighted_grad_diff_sq;
    const auto dm = damping_functionals(d, s, ref, th);
    r.damping_mid = dm.mid;
    r.damping_high = dm.high;
    r.damping_low = dm.low;
    r.total_entropy = total_entropy(d, s);
    return r;
}

InequalityResiduals inequality_residuals(const std::vector<DiagnosticsRecord>& window) {
    if (window.size() < 2) throw DomainError("inequality residuals need at least two records");
    const auto& a = window.front();
    const auto& b = window.back();
    InequalityResiduals r;
    r.entropy_residual = (b.total_entropy - a.total_entropy) -
                         ((b.entropy_production_time_integral - a.entropy_production_time_integral) -
                          (b.boundary_entropy_flux_time_integral - a.boundary_entropy_flux_time_integral));
    r.ballistic_residual = (b.ballistic_source_time_integral - a.ballistic_source_time_integral) -
                           (b.ballistic_energy - a.ballistic_energy);
    return r;
}

}  // namespace nsf
