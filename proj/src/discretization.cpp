#include "nsf/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

using Triplet = Eigen::Triplet<double>;

}  // namespace

std::string to_string(Reconstruction r) { return r == Reconstruction::Upwind ? "upwind" : "minmod"; }

Reconstruction reconstruction_from_string(const std::string& name) {
    if (name == "upwind") return Reconstruction::Upwind;
    if (name == "minmod") return Reconstruction::Minmod;
    throw DomainError("unknown reconstruction '" + name + "' (expected upwind or minmod)");
}

Discretization::Discretization(Grid grid, Models models, BoundaryData bc, Potential g, Reconstruction recon)
    : grid_(std::move(grid)), models_(std::move(models)), bc_(std::move(bc)), g_(std::move(g)), recon_(recon) {
    grid_.check();
    models_.gas.check();
    models_.transport.check();
    const auto nx = static_cast<std::size_t>(grid_.nx);
    if (bc_.theta_bottom.size() != nx || bc_.theta_top.size() != nx)
        throw DomainError("wall temperature arrays do not match the grid");
    for (std::size_t i = 0; i < nx; ++i)
        if (!(bc_.theta_bottom[i] > 0.0) || !(bc_.theta_top[i] > 0.0))
            throw DomainError("wall temperature must be positive");
    if (g_.cell.size() != grid_.cells() || g_.grad_x.size() != grid_.x_faces() || g_.grad_z.size() != grid_.z_faces())
        throw DomainError("potential arrays do not match the grid");

    k_bottom_.resize(nx);
    k_top_.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        k_bottom_[i] = kirchhoff(models_.transport, bc_.theta_bottom[i]);
        k_top_[i] = kirchhoff(models_.transport, bc_.theta_top[i]);
    }

    const int nz = grid_.nz;
    const double dx2 = grid_.dx() * grid_.dx(), dz2 = grid_.dz() * grid_.dz();
    std::vector<Triplet> t;
    heat_b_.assign(grid_.cells(), 0.0);
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < grid_.nx; ++i) {
            const auto c = static_cast<int>(grid_.cell(i, k));
            if (grid_.nx > 1) {
                const auto l = static_cast<int>(grid_.cell(i - 1, k));
                t.emplace_back(c, c, 1.0 / dx2);
                t.emplace_back(c, l, -1.0 / dx2);
                t.emplace_back(l, l, 1.0 / dx2);
                t.emplace_back(l, c, -1.0 / dx2);
            }
            if (k > 0) {
                const auto b = static_cast<int>(grid_.cell(i, k - 1));
                t.emplace_back(c, c, 1.0 / dz2);
                t.emplace_back(c, b, -1.0 / dz2);
                t.emplace_back(b, b, 1.0 / dz2);
                t.emplace_back(b, c, -1.0 / dz2);
            }
        }
    }
    for (int i = 0; i < grid_.nx; ++i) {
        const auto c0 = static_cast<int>(grid_.cell(i, 0));
        const auto c1 = static_cast<int>(grid_.cell(i, nz - 1));
        t.emplace_back(c0, c0, 2.0 / dz2);
        t.emplace_back(c1, c1, 2.0 / dz2);
        heat_b_[c0] += 2.0 * k_bottom_[i] / dz2;
        heat_b_[c1] += 2.0 * k_top_[i] / dz2;
    }
    heat_.resize(static_cast<Eigen::Index>(grid_.cells()), static_cast<Eigen::Index>(grid_.cells()));
    heat_.setFromTriplets(t.begin(), t.end());
    heat_.makeCompressed();
}

Field Discretization::pack_velocity(const FluidState& s) const {
    Field v(velocity_size());
    std::copy(s.u.begin(), s.u.end(), v.begin());
    std::copy(s.w.begin(), s.w.end(), v.begin() + static_cast<std::ptrdiff_t>(grid_.x_faces()));
    return v;
}

void Discretization::unpack_velocity(const Field& v, FluidState& s) const {
    const auto nu = static_cast<std::ptrdiff_t>(grid_.x_faces());
    s.u.assign(v.begin(), v.begin() + nu);
    s.w.assign(v.begin() + nu, v.end());
}

Field Discretization::face_density(const Field& rho) const {
    Field r(velocity_size());
    const auto nu = grid_.x_faces();
    for (int k = 0; k < grid_.nz; ++k)
        for (int i = 0; i < grid_.nx; ++i)
            r[grid_.x_face(i, k)] = 0.5 * (rho[grid_.cell(i - 1, k)] + rho[grid_.cell(i, k)]);
    for (int k = 1; k < grid_.nz; ++k)
        for (int i = 0; i < grid_.nx; ++i)
            r[nu + grid_.z_face(i, k)] = 0.5 * (rho[grid_.cell(i, k - 1)] + rho[grid_.cell(i, k)]);
    return r;
}

double Discretization::face_value(double, const Field& q, std::size_t upw, std::size_t dnw, std::size_t far,
                                  bool has_far) const {
    if (recon_ == Reconstruction::Upwind || !has_far) return q[upw];
    return q[upw] + 0.5 * minmod(q[upw] - q[far], q[dnw] - q[upw]);
}

MassFlux Discretization::mass_flux(const FluidState& s) const {
    MassFlux f;
    const int nx = grid_.nx, nz = grid_.nz;
    f.fx.assign(grid_.x_faces(), 0.0);
    f.fz.assign(static_cast<std::size_t>(nx) * (nz + 1), 0.0);
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double u = s.u[grid_.x_face(i, k)];
            if (u == 0.0) continue;
            const auto l = grid_.cell(i - 1, k), r = grid_.cell(i, k);
            const double q = u > 0.0 ? face_value(u, s.rho, l, r, grid_.cell(i - 2, k), nx > 2)
                                     : face_value(u, s.rho, r, l, grid_.cell(i + 1, k), nx > 2);
            f.fx[grid_.x_face(i, k)] = u * q;
        }
    }
    for (int k = 1; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double w = s.w[grid_.z_face(i, k)];
            if (w == 0.0) continue;
            const auto b = grid_.cell(i, k - 1), t = grid_.cell(i, k);
            const double q = w > 0.0 ? face_value(w, s.rho, b, t, k >= 2 ? grid_.cell(i, k - 2) : b, k >= 2)
                                     : face_value(w, s.rho, t, b, k + 1 < nz ? grid_.cell(i, k + 1) : t, k + 1 < nz);
            f.fz[static_cast<std::size_t>(k) * nx + i] = w * q;
        }
    }
    return f;
}

Field Discretization::divergence(const MassFlux& f) const {
    const int nx = grid_.nx, nz = grid_.nz;
    const double dx = grid_.dx(), dz = grid_.dz();
    Field d(grid_.cells());
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            double v = (f.fz[static_cast<std::size_t>(k + 1) * nx + i] - f.fz[static_cast<std::size_t>(k) * nx + i]) / dz;
            if (nx > 1) v += (f.fx[grid_.x_face(i + 1, k)] - f.fx[grid_.x_face(i, k)]) / dx;
            d[grid_.cell(i, k)] = v;
        }
    }
    return d;
}

Field Discretization::transport_divergence(const MassFlux& f, const Field& q) const {
    const int nx = grid_.nx, nz = grid_.nz;
    MassFlux g;
    g.fx.assign(f.fx.size(), 0.0);
    g.fz.assign(f.fz.size(), 0.0);
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const auto fi = grid_.x_face(i, k);
            const double fl = f.fx[fi];
            if (fl == 0.0) continue;
            const auto l = grid_.cell(i - 1, k), r = grid_.cell(i, k);
            const double qf = fl > 0.0 ? face_value(fl, q, l, r, grid_.cell(i - 2, k), nx > 2)
                                       : face_value(fl, q, r, l, grid_.cell(i + 1, k), nx > 2);
            g.fx[fi] = fl * qf;
        }
    }
    for (int k = 1; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const auto fi = static_cast<std::size_t>(k) * nx + i;
            const double fl = f.fz[fi];
            if (fl == 0.0) continue;
            const auto b = grid_.cell(i, k - 1), t = grid_.cell(i, k);
            const double qf = fl > 0.0 ? face_value(fl, q, b, t, k >= 2 ? grid_.cell(i, k - 2) : b, k >= 2)
                                       : face_value(fl, q, t, b, k + 1 < nz ? grid_.cell(i, k + 1) : t, k + 1 < nz);
            g.fz[fi] = fl * qf;
        }
    }
    return divergence(g);
}

Field Discretization::velocity_divergence(const FluidState& s) const {
    MassFlux f;
    const int nx = grid_.nx, nz = grid_.nz;
    f.fx = s.u;
    f.fz.assign(static_cast<std::size_t>(nx) * (nz + 1), 0.0);
    for (int k = 1; k < nz; ++k)
        for (int i = 0; i < nx; ++i) f.fz[static_cast<std::size_t>(k) * nx + i] = s.w[grid_.z_face(i, k)];
    return divergence(f);
}

namespace {

// Strain pieces shared by the dissipation and the viscous operator.
struct Strain {
    const Grid& g;
    const FluidState& s;

    double w_at(int i, int k) const { return (k <= 0 || k >= g.nz) ? 0.0 : s.w[g.z_face(i, k)]; }
    double u_at(int i, int k) const {
        if (k < 0) return -s.u[g.x_face(i, 0)];
        if (k >= g.nz) return -s.u[g.x_face(i, g.nz - 1)];
        return s.u[g.x_face(i, k)];
    }
    double d11(int i, int k) const {
        return g.nx > 1 ? (s.u[g.x_face(i + 1, k)] - s.u[g.x_face(i, k)]) / g.dx() : 0.0;
    }
    double d33(int i, int k) const { return (w_at(i, k + 1) - w_at(i, k)) / g.dz(); }
    /// du/dz + dw/dx at corner (i, k), 0 <= k <= nz.
    double shear(int i, int k) const {
        double v = (u_at(i, k) - u_at(i, k - 1)) / g.dz();
        if (g.nx > 1) v += (w_at(i, k) - w_at(i - 1, k)) / g.dx();
        return v;
    }
};

double corner_mu(const Grid& g, const Field& mu, int i, int k) {
    if (k == 0) return 0.5 * (mu[g.cell(i - 1, 0)] + mu[g.cell(i, 0)]);
    if (k == g.nz) return 0.5 * (mu[g.cell(i - 1, g.nz - 1)] + mu[g.cell(i, g.nz - 1)]);
    return 0.25 * (mu[g.cell(i - 1, k - 1)] + mu[g.cell(i, k - 1)] + mu[g.cell(i - 1, k)] + mu[g.cell(i, k)]);
}

// Calls emit(row, col, coef) for every entry of the viscous operator
// v -> div S(theta, D v) on the packed velocity layout.
template <class Emit>
void for_each_viscous_entry(const Grid& g, const Field& mu, const Field& eta, Emit&& emit) {
    const int nx = g.nx, nz = g.nz;
    const double dx = g.dx(), dz = g.dz();
    const auto nu = static_cast<long>(g.x_faces());
    auto ucol = [&](int i, int k) { return static_cast<long>(g.x_face(i, k)); };
    auto wcol = [&](int i, int k) { return nu + static_cast<long>(g.z_face(i, k)); };

    struct Term {
        long col;
        double coef;
    };
    std::vector<Term> d11, d33;
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double m = mu[g.cell(i, k)], lam = eta[g.cell(i, k)] - 2.0 / 3.0 * m;
            d11.clear();
            d33.clear();
            if (nx > 1) {
                d11.push_back({ucol(i + 1, k), 1.0 / dx});
                d11.push_back({ucol(i, k), -1.0 / dx});
            }
            if (k + 1 < nz) d33.push_back({wcol(i, k + 1), 1.0 / dz});
            if (k > 0) d33.push_back({wcol(i, k), -1.0 / dz});
            // S11 = (2 mu + lam) D11 + lam D33, S33 = lam D11 + (2 mu + lam) D33
            auto spread = [&](long row, double w, double a11, double a33) {
                for (const auto& t : d11) emit(row, t.col, w * a11 * t.coef);
                for (const auto& t : d33) emit(row, t.col, w * a33 * t.coef);
            };
            if (nx > 1) {
                spread(ucol(i, k), 1.0 / dx, 2.0 * m + lam, lam);
                spread(ucol(i + 1, k), -1.0 / dx, 2.0 * m + lam, lam);
            }
            if (k > 0) spread(wcol(i, k), 1.0 / dz, lam, 2.0 * m + lam);
            if (k + 1 < nz) spread(wcol(i, k + 1), -1.0 / dz, lam, 2.0 * m + lam);
        }
    }
    std::vector<Term> sh;
    for (int k = 0; k <= nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double m = corner_mu(g, mu, i, k);
            sh.clear();
            if (k == 0) {
                sh.push_back({ucol(i, 0), 2.0 / dz});
            } else if (k == nz) {
                sh.push_back({ucol(i, nz - 1), -2.0 / dz});
            } else {
                sh.push_back({ucol(i, k), 1.0 / dz});
                sh.push_back({ucol(i, k - 1), -1.0 / dz});
                if (nx > 1) {
                    sh.push_back({wcol(i, k), 1.0 / dx});
                    sh.push_back({wcol(i - 1, k), -1.0 / dx});
                }
            }
            auto spread = [&](long row, double w) {
                for (const auto& t : sh) emit(row, t.col, w * m * t.coef);
            };
            if (k >= 1) spread(ucol(i, k - 1), 1.0 / dz);
            if (k + 1 <= nz) spread(ucol(i, k), -1.0 / dz);
            if (k >= 1 && k < nz && nx > 1) {
                spread(wcol(i - 1, k), 1.0 / dx);
                spread(wcol(i, k), -1.0 / dx);
            }
        }
    }
}

}  // namespace

Field Discretization::dissipation(const FluidState& s, const Field& theta_visc) const {
    const Grid& g = grid_;
    Field mu(g.cells()), eta(g.cells()), sd(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        mu[c] = viscosity(models_.transport, theta_visc[c]);
        eta[c] = bulk_viscosity(models_.transport, theta_visc[c]);
    }
    Strain st{g, s};
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const auto c = g.cell(i, k);
            const double a = st.d11(i, k), b = st.d33(i, k), d = a + b, t = d / 3.0;
            double v = 2.0 * mu[c] * ((a - t) * (a - t) + t * t + (b - t) * (b - t)) + eta[c] * d * d;
            double corners = 0.0;
            for (int di = 0; di <= 1; ++di) {
                for (int dk = 0; dk <= 1; ++dk) {
                    const double sh = st.shear(i + di, k + dk);
                    corners += corner_mu(g, mu, i + di, k + dk) * sh * sh;
                }
            }
            sd[c] = v + 0.25 * corners;
        }
    }
    return sd;
}

SparseMatrix Discretization::viscous_matrix(const Field& theta) const {
    Field mu(grid_.cells()), eta(grid_.cells());
    for (std::size_t c = 0; c < grid_.cells(); ++c) {
        mu[c] = viscosity(models_.transport, theta[c]);
        eta[c] = bulk_viscosity(models_.transport, theta[c]);
    }
    std::vector<Triplet> t;
    t.reserve(velocity_size() * 12);
    for_each_viscous_entry(grid_, mu, eta, [&](long r, long c, double v) { t.emplace_back(r, c, v); });
    const auto n = static_cast<Eigen::Index>(velocity_size());
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.prune(0.0);
    return a;
}

Field Discretization::viscous_apply(const Field& theta, const Field& v) const {
    Field mu(grid_.cells()), eta(grid_.cells());
    for (std::size_t c = 0; c < grid_.cells(); ++c) {
        mu[c] = viscosity(models_.transport, theta[c]);
        eta[c] = bulk_viscosity(models_.transport, theta[c]);
    }
    Field out(velocity_size(), 0.0);
    for_each_viscous_entry(grid_, mu, eta, [&](long r, long c, double a) { out[r] += a * v[c]; });
    return out;
}

Field Discretization::heat_divergence(const Field& kc) const {
    Eigen::Map<const Eigen::VectorXd> k(kc.data(), static_cast<Eigen::Index>(kc.size()));
    Eigen::VectorXd d = heat_ * k;
    Field out(kc.size());
    for (std::size_t c = 0; c < kc.size(); ++c) out[c] = d[static_cast<Eigen::Index>(c)] - heat_b_[c];
    return out;
}

Field Discretization::vertical_heat_flux(const Field& kc) const {
    const int nx = grid_.nx, nz = grid_.nz;
    const double dz = grid_.dz();
    Field q(static_cast<std::size_t>(nx) * (nz + 1));
    for (int i = 0; i < nx; ++i) {
        q[i] = -(kc[grid_.cell(i, 0)] - k_bottom_[i]) / (0.5 * dz);
        q[static_cast<std::size_t>(nz) * nx + i] = -(k_top_[i] - kc[grid_.cell(i, nz - 1)]) / (0.5 * dz);
        for (int k = 1; k < nz; ++k)
            q[static_cast<std::size_t>(k) * nx + i] = -(kc[grid_.cell(i, k)] - kc[grid_.cell(i, k - 1)]) / dz;
    }
    return q;
}

Field Discretization::horizontal_heat_flux(const Field& kc) const {
    Field q(grid_.x_faces(), 0.0);
    if (grid_.nx == 1) return q;
    for (int k = 0; k < grid_.nz; ++k)
        for (int i = 0; i < grid_.nx; ++i)
            q[grid_.x_face(i, k)] = -(kc[grid_.cell(i, k)] - kc[grid_.cell(i - 1, k)]) / grid_.dx();
    return q;
}

Field Discretization::momentum_forces(const FluidState& s, const Field& rho, const Field& p) const {
    const Grid& g = grid_;
    const int nx = g.nx, nz = g.nz;
    const double dx = g.dx(), dz = g.dz();
    const auto nu = g.x_faces();
    Strain st{g, s};
    Field f(velocity_size());
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const auto fi = g.x_face(i, k);
            const double rf = 0.5 * (rho[g.cell(i - 1, k)] + rho[g.cell(i, k)]);
            const double u = s.u[fi];
            double adv = 0.0, grad_p = 0.0;
            if (nx > 1) {
                adv += u > 0.0 ? u * (u - s.u[g.x_face(i - 1, k)]) / dx : u * (s.u[g.x_face(i + 1, k)] - u) / dx;
                grad_p = (p[g.cell(i, k)] - p[g.cell(i - 1, k)]) / dx;
            }
            const double wbar =
                0.25 * (st.w_at(i - 1, k) + st.w_at(i, k) + st.w_at(i - 1, k + 1) + st.w_at(i, k + 1));
            adv += wbar > 0.0 ? wbar * (u - st.u_at(i, k - 1)) / dz : wbar * (st.u_at(i, k + 1) - u) / dz;
            f[fi] = -rf * adv - grad_p + rf * g_.grad_x[fi];
        }
    }
    for (int k = 1; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            const auto fi = g.z_face(i, k);
            const double rf = 0.5 * (rho[g.cell(i, k - 1)] + rho[g.cell(i, k)]);
            const double w = s.w[fi];
            double adv = w > 0.0 ? w * (w - st.w_at(i, k - 1)) / dz : w * (st.w_at(i, k + 1) - w) / dz;
            if (nx > 1) {
                const double ubar = 0.25 * (s.u[g.x_face(i, k - 1)] + s.u[g.x_face(i + 1, k - 1)] +
                                            s.u[g.x_face(i, k)] + s.u[g.x_face(i + 1, k)]);
                adv += ubar > 0.0 ? ubar * (w - st.w_at(i - 1, k)) / dx : ubar * (st.w_at(i + 1, k) - w) / dx;
            }
            const double grad_p = (p[g.cell(i, k)] - p[g.cell(i, k - 1)]) / dz;
            f[nu + fi] = -rf * adv - grad_p + rf * g_.grad_z[fi];
        }
    }
    return f;
}

StationaryResidual Discretization::stationary_residual(const FluidState& s, double lambda) const {
    StationaryResidual r;
    const auto flux = mass_flux(s);
    r.continuity = divergence(flux);
    for (double& v : r.continuity) v += lambda;

    const Field p = pressure_field(s.rho, s.theta);
    r.momentum = momentum_forces(s, s.rho, p);
    const Field visc = viscous_apply(s.theta, pack_velocity(s));
    for (std::size_t f = 0; f < r.momentum.size(); ++f) r.momentum[f] = -(r.momentum[f] + visc[f]);

    const Field e = energy_field(s.rho, s.theta);
    r.energy = transport_divergence(flux, e);
    const Field dq = heat_divergence(kirchhoff_field(s.theta));
    const Field sd = dissipation(s, s.theta);
    const Field du = velocity_divergence(s);
    for (std::size_t c = 0; c < r.energy.size(); ++c) r.energy[c] += dq[c] - sd[c] + p[c] * du[c];
    return r;
}

Field Discretization::pressure_field(const Field& rho, const Field& theta) const {
    Field p(rho.size());
    for (std::size_t c = 0; c < rho.size(); ++c) p[c] = pressure(models_.gas, rho[c], theta[c]);
    return p;
}

Field Discretization::energy_field(const Field& rho, const Field& theta) const {
    Field e(rho.size());
    for (std::size_t c = 0; c < rho.size(); ++c) e[c] = internal_energy(models_.gas, rho[c], theta[c]);
    return e;
}

Field Discretization::kirchhoff_field(const Field& theta) const {
    Field k(theta.size());
    for (std::size_t c = 0; c < theta.size(); ++c) k[c] = kirchhoff(models_.transport, theta[c]);
    return k;
}

double Discretization::total_mass(const Field& rho) const {
    double m = 0.0;
    for (double r : rho) m += r;
    return m * grid_.cell_volume();
}

}  // namespace nsf
