#include <gtest/gtest.h>

#include <cmath>

#include "nsf/errors.hpp"
#include "nsf/grid.hpp"
#include "nsf/problem.hpp"

using namespace nsf;

TEST(Grid, ColumnLayout) {
    const Grid g = Grid::column(8);
    EXPECT_EQ(g.cells(), 8u);
    EXPECT_EQ(g.x_faces(), 8u);
    EXPECT_EQ(g.z_faces(), 7u);
    EXPECT_DOUBLE_EQ(g.dz(), 0.125);
    EXPECT_DOUBLE_EQ(g.volume(), 1.0);
    EXPECT_DOUBLE_EQ(g.z_center(0), 0.0625);
    EXPECT_EQ(g.z_face(0, 1), 0u);
    EXPECT_EQ(g.z_face(0, 7), 6u);
}

TEST(Grid, SlabWrapsPeriodically) {
    const Grid g = Grid::slab(4, 3);
    EXPECT_DOUBLE_EQ(g.lx, 2.0);
    EXPECT_DOUBLE_EQ(g.x0, -1.0);
    EXPECT_DOUBLE_EQ(g.volume(), 2.0);
    EXPECT_EQ(g.cell(-1, 0), g.cell(3, 0));
    EXPECT_EQ(g.cell(4, 2), g.cell(0, 2));
    EXPECT_EQ(g.x_face(5, 1), g.x_face(1, 1));
    EXPECT_DOUBLE_EQ(g.x_center(0), -0.75);
    EXPECT_DOUBLE_EQ(g.cell_volume() * static_cast<double>(g.cells()), g.volume());
}

TEST(Grid, CheckRejectsBadCounts) {
    Grid g = Grid::column(8);
    g.nz = 0;
    EXPECT_THROW(g.check(), DomainError);
    g = Grid::slab(4, 4);
    g.lx = -1.0;
    EXPECT_THROW(g.check(), DomainError);
}

TEST(FluidState, UniformAndShape) {
    const Grid g = Grid::slab(3, 4);
    const FluidState s = FluidState::uniform(g, 2.0, 1.5);
    EXPECT_EQ(s.rho.size(), 12u);
    EXPECT_EQ(s.w.size(), 9u);
    EXPECT_NO_THROW(s.check_shape(g));
    EXPECT_THROW(s.check_shape(Grid::slab(3, 5)), DomainError);
}

TEST(Problem, LateralBoundaryProfile) {
    ProblemConfig cfg;
    cfg.dimension = 2;
    cfg.lx = 2.0;
    cfg.lateral_amplitude = 0.1;
    const Grid g = make_grid(cfg, 8, 4);
    const auto bc = boundary_data(cfg, g);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x_center(i);
        EXPECT_NEAR(bc.theta_bottom[i], 1.0 + 0.1 * std::cos(M_PI * (x + 1.0)), 1e-15);
        EXPECT_DOUBLE_EQ(bc.theta_top[i], 1.0);
    }
    EXPECT_NEAR(mean_boundary_temperature(bc), 1.0, 1e-15);
    EXPECT_NEAR(epsilon_report(cfg, g), 0.1 * std::abs(std::cos(M_PI / 8.0)), 1e-15);
    EXPECT_FALSE(is_static(cfg, g));
    EXPECT_FALSE(is_layered(cfg, g));
}

TEST(Problem, LinearPotential) {
    ProblemConfig cfg;
    cfg.gz = -0.01;
    const Grid g = make_grid(cfg, 1, 10);
    const auto p = potential(cfg, g);
    EXPECT_NEAR(p.cell[3], -0.01 * 0.35, 1e-17);
    for (double v : p.grad_z) EXPECT_DOUBLE_EQ(v, -0.01);
    for (double v : p.grad_x) EXPECT_DOUBLE_EQ(v, 0.0);
    // sup |G| on [0,1] is 0.01 and |grad G| = 0.01
    EXPECT_DOUBLE_EQ(potential_c1_norm(cfg, g), 0.02);
    EXPECT_TRUE(is_layered(cfg, g));
    EXPECT_FALSE(is_static(cfg, g));
}

TEST(Problem, StaticDetection) {
    ProblemConfig cfg;
    const Grid g = make_grid(cfg, 1, 8);
    EXPECT_TRUE(is_static(cfg, g));
    EXPECT_DOUBLE_EQ(epsilon_report(cfg, g), 0.0);
    // m0 + 1/m0 + 0 + 1/theta + theta
    EXPECT_NEAR(data_norm(cfg, g), 4.0, 1e-14);
}

TEST(Problem, CheckRejectsInvalidData) {
    ProblemConfig cfg;
    const Grid g = make_grid(cfg, 1, 8);
    cfg.m0 = 0.0;
    EXPECT_THROW(cfg.check(g), ProblemError);
    cfg.m0 = 1.0;
    cfg.theta_top = -1.0;
    EXPECT_THROW(cfg.check(g), ProblemError);
    cfg.theta_top = 1.0;
    cfg.gx = 1.0;
    EXPECT_THROW(cfg.check(g), ProblemError);
}
