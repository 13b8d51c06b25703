#pragma once

// Data of the open system: domain, total mass, wall temperature and potential.

#include "nsf/grid.hpp"

namespace nsf {

struct ProblemConfig {
    int dimension = 1;
    double lx = 1.0;  ///< periodic length; ignored in 1-D
    double m0 = 1.0;

    /// Plate temperatures. Equal plates give a constant boundary temperature.
    double theta_bottom = 1.0;
    double theta_top = 1.0;
    /// Bottom-wall modulation theta_bottom + amplitude cos(2 pi x / lx) (2-D only).
    double lateral_amplitude = 0.0;
    /// Optional per-node wall temperatures; override the plates when non-empty.
    Field bottom_profile;
    Field top_profile;

    /// Linear potential G = gx x + gz z.
    double gx = 0.0;
    double gz = 0.0;
    /// Optional per-cell potential; overrides (gx, gz) when non-empty.
    Field potential_field;

    /// Throws ProblemError (bad mass, nonpositive temperatures, horizontal g in 1-D).
    void check(const Grid& grid) const;

    double domain_volume() const { return dimension == 1 ? 1.0 : lx; }
};

Grid make_grid(const ProblemConfig& cfg, int nx, int nz);
BoundaryData boundary_data(const ProblemConfig& cfg, const Grid& grid);
Potential potential(const ProblemConfig& cfg, const Grid& grid);

/// Mean of the wall temperature over both walls.
double mean_boundary_temperature(const BoundaryData& bc);

/// sup |G| + sup |grad G| over the closed domain.
double potential_c1_norm(const ProblemConfig& cfg, const Grid& grid);

/// max(||G||_{C^1}, ||theta_B - mean theta_B||_inf): the smallness parameter of
/// the stationary problem.
double epsilon_report(const ProblemConfig& cfg, const Grid& grid);

/// m0 + 1/m0 + ||G||_{W^{1,inf}} + ||1/theta_B||_inf + ||theta_B||_{W^{2,inf}},
/// with wall derivatives taken by periodic differences along the wall.
double data_norm(const ProblemConfig& cfg, const Grid& grid);

/// Constant wall temperature and zero potential.
bool is_static(const ProblemConfig& cfg, const Grid& grid);

/// Vertical potential and x-independent wall temperature.
bool is_layered(const ProblemConfig& cfg, const Grid& grid);

}  // namespace nsf
