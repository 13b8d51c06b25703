#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "nsf/errors.hpp"

namespace nsf {

namespace detail {

// RK4 march of rho' = (rho g - p_theta theta') / p_rho from rho(0) = rho0,
// sampling at cell centers. Empty result if the density leaves (0, inf).
template <class Theta, class DTheta>
std::optional<Field> hydrostatic_march(const GasModel& gas, Theta& theta, DTheta& dtheta, double g, double rho0,
                                       const Grid& grid, int substeps) {
    auto rhs = [&](double z, double rho) {
        const double th = theta(z);
        const auto pp = pressure_partials(gas, rho, th);
        return (rho * g - pp.d_theta * dtheta(z)) / pp.d_rho;
    };
    Field out(static_cast<std::size_t>(grid.nz));
    double z = 0.0, rho = rho0;
    try {
        for (int k = 0; k < grid.nz; ++k) {
            const double target = grid.z_center(k);
            const int n = k == 0 ? std::max(1, substeps / 2) : substeps;
            const double h = (target - z) / n;
            for (int s = 0; s < n; ++s) {
                const double k1 = rhs(z, rho);
                const double k2 = rhs(z + 0.5 * h, rho + 0.5 * h * k1);
                const double k3 = rhs(z + 0.5 * h, rho + 0.5 * h * k2);
                const double k4 = rhs(z + h, rho + h * k3);
                rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                z = (s + 1 == n) ? target : z + h;
                if (!(rho > 0.0) || !std::isfinite(rho)) return std::nullopt;
            }
            out[static_cast<std::size_t>(k)] = rho;
        }
    } catch (const DomainError&) {
        return std::nullopt;
    }
    return out;
}

}  // namespace detail

template <class Theta, class DTheta>
Field solve_hydrostatic_density(const GasModel& gas, Theta&& theta, DTheta&& dtheta, double g, double m0,
                                const Grid& grid, const HydrostaticOptions& opt) {
    if (!(m0 > 0.0)) throw ProblemError("total mass must be positive");
    const double dz = grid.dz();
    auto mass_of = [&](const Field& r) {
        double m = 0.0;
        for (double v : r) m += v;
        return m * dz;
    };
    // Mass defect as a function of the bottom density; a march that leaves the
    // positive cone counts as "too light".
    auto defect = [&](double rho0) {
        auto r = detail::hydrostatic_march(gas, theta, dtheta, g, rho0, grid, opt.substeps);
        if (!r) return -m0;
        return mass_of(*r) - m0;
    };
    double lo = m0, hi = m0;
    double flo = defect(lo), fhi = flo;
    int expand = 0;
    while (flo > 0.0 && expand < 200) {
        hi = lo;
        fhi = flo;
        lo *= 0.5;
        flo = defect(lo);
        ++expand;
    }
    while (fhi < 0.0 && expand < 200) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = defect(hi);
        ++expand;
    }
    if (!(flo <= 0.0 && fhi >= 0.0)) {
        std::ostringstream os;
        os << "hydrostatic shooting found no bracket: rho(0) in [" << lo << ", " << hi << "], mass defects "
           << flo << ", " << fhi;
        throw SolverError(os.str(), {lo, hi, flo, fhi});
    }
    double rho0 = lo;
    if (flo != 0.0 && fhi != 0.0 && lo != hi) {
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
        auto [a, b] = boost::math::tools::toms748_solve(defect, lo, hi, flo, fhi, tol, iters);
        rho0 = std::abs(defect(a)) <= std::abs(defect(b)) ? a : b;
    } else if (fhi == 0.0) {
        rho0 = hi;
    }
    auto r = detail::hydrostatic_march(gas, theta, dtheta, g, rho0, grid, opt.substeps);
    if (!r) throw PositivityError(PositivityError::Field::Density, 0, rho0);
    const double err = std::abs(mass_of(*r) - m0);
    if (!(err < opt.mass_tol)) {
        std::ostringstream os;
        os << "hydrostatic shooting stalled with mass error " << err;
        throw SolverError(os.str(), {rho0, err});
    }
    return *r;
}

}  // namespace nsf
