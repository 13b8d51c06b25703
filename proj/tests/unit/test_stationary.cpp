#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nsf/errors.hpp"
#include "nsf/stationary.hpp"

using namespace nsf;

namespace {

ProblemConfig rb_column() {
    ProblemConfig c;
    c.theta_bottom = 1.05;
    c.theta_top = 1.0;
    c.gz = -0.01;
    return c;
}

Discretization make(const ProblemConfig& cfg, int nx, int nz) {
    const Grid g = make_grid(cfg, nx, nz);
    return Discretization(g, Models{}, boundary_data(cfg, g), potential(cfg, g));
}

// K(theta) = theta + theta^8 / 8 for the default transport model, inverted by bisection.
double kirchhoff_inverse_oracle(double k) {
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid + std::pow(mid, 8) / 8.0 < k ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(StaticUniform, UniformState) {
    ProblemConfig cfg;
    cfg.m0 = 3.0;
    cfg.theta_bottom = cfg.theta_top = 1.2;
    const Grid g = make_grid(cfg, 1, 16);
    const auto st = static_uniform(cfg, g, Models{});
    for (double r : st.fields.rho) EXPECT_DOUBLE_EQ(r, 3.0);
    for (double t : st.fields.theta) EXPECT_DOUBLE_EQ(t, 1.2);
    EXPECT_EQ(st.residual_continuity, 0.0);
    EXPECT_EQ(st.residual_momentum, 0.0);
    EXPECT_LT(st.residual_energy, 1e-12);  // rounding in L K - b only
    EXPECT_EQ(st.proximity.ratio, 0.0);
}

TEST(StaticUniform, RejectsDrivenProblems) {
    const ProblemConfig cfg = rb_column();
    EXPECT_THROW(static_uniform(cfg, make_grid(cfg, 1, 8), Models{}), ProblemError);
}

TEST(HeatProfile, MatchesKirchhoffOracle) {
    const TransportModel t;
    const double kb = 1.3 + std::pow(1.3, 8) / 8.0, ku = 0.8 + std::pow(0.8, 8) / 8.0;
    std::vector<double> z;
    for (int i = 0; i <= 20; ++i) z.push_back(i / 20.0);
    const Field th = solve_heat_profile_1d(t, 1.3, 0.8, z);
    for (std::size_t i = 0; i < z.size(); ++i)
        EXPECT_NEAR(th[i], kirchhoff_inverse_oracle((1.0 - z[i]) * kb + z[i] * ku), 1e-13);
    EXPECT_DOUBLE_EQ(th.front(), 1.3);
    EXPECT_DOUBLE_EQ(th.back(), 0.8);
}

TEST(Hydrostatic, IsothermalWithoutGravityIsUniform) {
    const Grid g = Grid::column(32);
    const Field rho = solve_hydrostatic_density(GasModel{}, TransportModel{}, 1.0, 1.0, 0.0, 1.5, g);
    for (double r : rho) EXPECT_NEAR(r, 1.5, 1e-13);
}

TEST(Hydrostatic, MassAndSecondOrderBalance) {
    // (p_{k+1} - p_k)/dz against the mean density times g: the defect is the
    // midpoint/trapezoid quadrature error and drops by 4 per refinement.
    const GasModel gas;
    const TransportModel tr;
    const double g = -0.5;
    double prev = 0.0;
    for (int nz : {32, 64, 128}) {
        const Grid grid = Grid::column(nz);
        const Field rho = solve_hydrostatic_density(gas, tr, 1.2, 1.0, g, 1.0, grid);
        double mass = 0.0;
        for (double r : rho) mass += r * grid.dz();
        EXPECT_NEAR(mass, 1.0, 1e-10);
        const Field th = solve_heat_profile(tr, 1.2, 1.0, grid);
        double defect = 0.0;
        for (int k = 0; k + 1 < nz; ++k) {
            const double dp = (pressure(gas, rho[k + 1], th[k + 1]) - pressure(gas, rho[k], th[k])) / grid.dz();
            defect = std::max(defect, std::abs(dp - 0.5 * (rho[k] + rho[k + 1]) * g));
        }
        if (prev > 0.0) EXPECT_NEAR(prev / defect, 4.0, 0.4);
        prev = defect;
    }
}

TEST(Hydrostatic, SlabColumnsCarryMassPerWidth) {
    const Grid slab = Grid::slab(4, 16);
    const Field rho = solve_hydrostatic_density(GasModel{}, TransportModel{}, 1.1, 1.0, -0.1, 2.0, slab);
    double mass = 0.0;
    for (double r : rho) mass += r * slab.cell_volume();
    EXPECT_NEAR(mass, 2.0, 1e-10);
    for (int k = 0; k < slab.nz; ++k)
        for (int i = 1; i < slab.nx; ++i) EXPECT_EQ(rho[slab.cell(i, k)], rho[slab.cell(0, k)]);
}

TEST(Newton, AgreesWithLayeredPipeline) {
    const ProblemConfig cfg = rb_column();
    const auto d = make(cfg, 1, 64);
    const auto pipe = solve_layered_pipeline(cfg, d.grid(), d.models());
    const auto newt = solve_stationary_newton(cfg, d, pipe.fields);
    double diff = 0.0;
    for (std::size_t c = 0; c < d.grid().cells(); ++c) {
        diff = std::max(diff, std::abs(pipe.fields.rho[c] - newt.fields.rho[c]));
        diff = std::max(diff, std::abs(pipe.fields.theta[c] - newt.fields.theta[c]));
    }
    EXPECT_LT(diff, 1e-8);
    EXPECT_LT(newt.mass_error, 1e-10);
    EXPECT_LT(newt.residual_energy, 1e-9);
    EXPECT_LT(newt.residual_momentum, 1e-9);
    EXPECT_LT(std::abs(newt.multiplier), 1e-9);
    for (double v : newt.fields.u) EXPECT_LT(std::abs(v), 1e-12);
}

TEST(Newton, HeatFluxIsConstantInLayeredState) {
    const ProblemConfig cfg = rb_column();
    const auto d = make(cfg, 1, 64);
    const auto st = solve_stationary(cfg, d, "auto");
    const Field q = d.vertical_heat_flux(d.kirchhoff_field(st.fields.theta));
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    EXPECT_LT(*hi - *lo, 1e-10);
    EXPECT_GT(*lo, 0.0);  // heat flows upward from the warmer plate
}

TEST(Newton, LateralHeatingDrivesFlow) {
    ProblemConfig cfg;
    cfg.dimension = 2;
    cfg.lx = 2.0;
    cfg.m0 = 2.0;
    cfg.gz = -0.01;
    cfg.lateral_amplitude = 4e-3;
    const auto d = make(cfg, 8, 8);
    const auto st = solve_stationary(cfg, d, "auto");
    EXPECT_LT(st.trace.back(), 1e-9);
    EXPECT_LT(st.mass_error, 1e-10);
    EXPECT_GT(st.proximity.u_dev, 0.0);
    EXPECT_GT(st.proximity.theta_dev, 0.0);
    EXPECT_LE(st.proximity.theta_dev, 4e-3);
}

TEST(Newton, NonconvergenceCarriesTrace) {
    const ProblemConfig cfg = rb_column();
    const auto d = make(cfg, 1, 16);
    NewtonOptions opt;
    opt.max_iter = 0;
    try {
        solve_stationary_newton(cfg, d, FluidState::uniform(d.grid(), 1.0, 1.0), opt);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        ASSERT_EQ(e.trace().size(), 1u);
        EXPECT_GT(e.trace()[0], 1e-9);
    }
}

TEST(Newton, RejectsNonpositiveGuess) {
    const ProblemConfig cfg = rb_column();
    const auto d = make(cfg, 1, 16);
    FluidState s = FluidState::uniform(d.grid(), 1.0, 1.0);
    s.theta[3] = -1.0;
    EXPECT_THROW(solve_stationary_newton(cfg, d, s), PositivityError);
}

TEST(SolveStationary, MethodDispatch) {
    ProblemConfig cfg;
    const auto d = make(cfg, 1, 16);
    EXPECT_EQ(solve_stationary(cfg, d, "auto").iterations, 0);
    EXPECT_THROW(solve_stationary(cfg, d, "shooting"), ProblemError);
    const ProblemConfig rb = rb_column();
    const auto d2 = make(rb, 1, 16);
    EXPECT_THROW(solve_stationary(rb, d2, "static"), ProblemError);
    EXPECT_GT(solve_stationary(rb, d2, "pipeline").residual_momentum, 0.0);
}

TEST(Proximity, StaticIsZero) {
    ProblemConfig cfg;
    const Grid g = make_grid(cfg, 1, 8);
    const auto p = proximity(cfg, g, FluidState::uniform(g, 1.0, 1.0));
    EXPECT_EQ(p.rho_dev, 0.0);
    EXPECT_EQ(p.theta_dev, 0.0);
    EXPECT_EQ(p.u_dev, 0.0);
    EXPECT_EQ(p.ratio, 0.0);
}
