#include "nsf/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

double max_abs_dev(const Field& f, double c) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v - c));
    return m;
}

bool uses_field(const ProblemConfig& cfg) { return !cfg.potential_field.empty(); }

}  // namespace

void ProblemConfig::check(const Grid& grid) const {
    if (!(m0 > 0.0)) throw ProblemError("total mass m0 must be positive");
    if (dimension != grid.dimension) throw ProblemError("problem and grid dimensions differ");
    if (dimension == 2 && !(lx > 0.0)) throw ProblemError("periodic length must be positive");
    if (!(theta_bottom > 0.0) || !(theta_top > 0.0))
        throw ProblemError("plate temperatures must be positive");
    if (dimension == 1 && (gx != 0.0 || lateral_amplitude != 0.0))
        throw ProblemError("a 1-D column admits neither horizontal gravity nor lateral wall modulation");
    if (!(std::abs(lateral_amplitude) < theta_bottom))
        throw ProblemError("lateral modulation would make the bottom temperature nonpositive");
    auto check_profile = [&](const Field& f, const char* name) {
        if (f.empty()) return;
        if (f.size() != static_cast<std::size_t>(grid.nx)) {
            std::ostringstream os;
            os << name << " has " << f.size() << " nodes, grid has " << grid.nx << " columns";
            throw ProblemError(os.str());
        }
        for (double v : f)
            if (!(v > 0.0)) throw ProblemError(std::string(name) + " must be positive everywhere");
    };
    check_profile(bottom_profile, "bottom temperature profile");
    check_profile(top_profile, "top temperature profile");
    if (uses_field(*this) && potential_field.size() != grid.cells())
        throw ProblemError("potential field size does not match the grid");
}

Grid make_grid(const ProblemConfig& cfg, int nx, int nz) {
    return cfg.dimension == 1 ? Grid::column(nz) : Grid::slab(nx, nz, cfg.lx);
}

BoundaryData boundary_data(const ProblemConfig& cfg, const Grid& grid) {
    BoundaryData bc;
    bc.theta_bottom.resize(grid.nx);
    bc.theta_top.resize(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
        double x = grid.x_center(i);
        bc.theta_bottom[i] = cfg.bottom_profile.empty()
                                 ? cfg.theta_bottom + cfg.lateral_amplitude *
                                                          std::cos(2.0 * std::numbers::pi * (x - grid.x0) / grid.lx)
                                 : cfg.bottom_profile[i];
        bc.theta_top[i] = cfg.top_profile.empty() ? cfg.theta_top : cfg.top_profile[i];
    }
    return bc;
}

Potential potential(const ProblemConfig& cfg, const Grid& grid) {
    Potential g;
    g.cell.resize(grid.cells());
    g.grad_x.resize(grid.x_faces());
    g.grad_z.resize(grid.z_faces());
    if (uses_field(cfg)) {
        g.cell = cfg.potential_field;
        for (int k = 0; k < grid.nz; ++k)
            for (int i = 0; i < grid.nx; ++i)
                g.grad_x[grid.x_face(i, k)] =
                    (g.cell[grid.cell(i, k)] - g.cell[grid.cell(i - 1, k)]) / grid.dx();
        for (int k = 1; k < grid.nz; ++k)
            for (int i = 0; i < grid.nx; ++i)
                g.grad_z[grid.z_face(i, k)] =
                    (g.cell[grid.cell(i, k)] - g.cell[grid.cell(i, k - 1)]) / grid.dz();
        return g;
    }
    for (int k = 0; k < grid.nz; ++k)
        for (int i = 0; i < grid.nx; ++i)
            g.cell[grid.cell(i, k)] = cfg.gx * grid.x_center(i) + cfg.gz * grid.z_center(k);
    std::fill(g.grad_x.begin(), g.grad_x.end(), grid.nx > 1 ? cfg.gx : 0.0);
    std::fill(g.grad_z.begin(), g.grad_z.end(), cfg.gz);
    return g;
}

double mean_boundary_temperature(const BoundaryData& bc) {
    double s = 0.0;
    for (double v : bc.theta_bottom) s += v;
    for (double v : bc.theta_top) s += v;
    return s / static_cast<double>(bc.theta_bottom.size() + bc.theta_top.size());
}

double potential_c1_norm(const ProblemConfig& cfg, const Grid& grid) {
    if (uses_field(cfg)) {
        auto g = potential(cfg, grid);
        double sup = 0.0, grad = 0.0;
        for (double v : g.cell) sup = std::max(sup, std::abs(v));
        for (std::size_t f = 0; f < g.grad_x.size(); ++f) grad = std::max(grad, std::abs(g.grad_x[f]));
        for (double v : g.grad_z) grad = std::max(grad, std::abs(v));
        return sup + grad;
    }
    double gx = grid.dimension == 1 ? 0.0 : cfg.gx;
    double xl = grid.x0, xr = grid.x0 + grid.lx;
    double sup = 0.0;
    for (double x : {xl, xr})
        for (double z : {0.0, 1.0}) sup = std::max(sup, std::abs(gx * x + cfg.gz * z));
    return sup + std::hypot(gx, cfg.gz);
}

double epsilon_report(const ProblemConfig& cfg, const Grid& grid) {
    auto bc = boundary_data(cfg, grid);
    double tb = mean_boundary_temperature(bc);
    double dev = std::max(max_abs_dev(bc.theta_bottom, tb), max_abs_dev(bc.theta_top, tb));
    return std::max(potential_c1_norm(cfg, grid), dev);
}

double data_norm(const ProblemConfig& cfg, const Grid& grid) {
    auto bc = boundary_data(cfg, grid);
    double inv = 0.0, sup = 0.0, d1 = 0.0, d2 = 0.0;
    for (const Field* f : {&bc.theta_bottom, &bc.theta_top}) {
        const Field& t = *f;
        int n = static_cast<int>(t.size());
        for (int i = 0; i < n; ++i) {
            inv = std::max(inv, 1.0 / t[i]);
            sup = std::max(sup, std::abs(t[i]));
            if (n > 1) {
                double l = t[(i + n - 1) % n], r = t[(i + 1) % n];
                d1 = std::max(d1, std::abs(r - l) / (2.0 * grid.dx()));
                d2 = std::max(d2, std::abs(r - 2.0 * t[i] + l) / (grid.dx() * grid.dx()));
            }
        }
    }
    return cfg.m0 + 1.0 / cfg.m0 + potential_c1_norm(cfg, grid) + inv + sup + d1 + d2;
}

bool is_static(const ProblemConfig& cfg, const Grid& grid) {
    auto bc = boundary_data(cfg, grid);
    double t0 = bc.theta_bottom.front();
    auto same = [&](const Field& f) {
        return std::all_of(f.begin(), f.end(), [&](double v) { return v == t0; });
    };
    if (!same(bc.theta_bottom) || !same(bc.theta_top)) return false;
    if (uses_field(cfg))
        return std::all_of(cfg.potential_field.begin(), cfg.potential_field.end(),
                           [&](double v) { return v == cfg.potential_field.front(); });
    return cfg.gx == 0.0 && cfg.gz == 0.0;
}

bool is_layered(const ProblemConfig& cfg, const Grid& grid) {
    if (uses_field(cfg)) return false;
    if (grid.dimension == 2 && cfg.gx != 0.0) return false;
    auto bc = boundary_data(cfg, grid);
    auto flat = [](const Field& f) {
        return std::all_of(f.begin(), f.end(), [&](double v) { return v == f.front(); });
    };
    return flat(bc.theta_bottom) && flat(bc.theta_top);
}

}  // namespace nsf
