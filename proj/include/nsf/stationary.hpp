#pragma once

// Stationary states of the open system with prescribed total mass.

#include <vector>

#include "nsf/discretization.hpp"
#include "nsf/problem.hpp"

namespace nsf {

/// Distance of a stationary state from the static state (m0/|Omega|, mean theta_B, 0).
struct Proximity {
    double rho_dev = 0.0;    ///< ||rho_s - m0/|Omega| ||_inf
    double theta_dev = 0.0;  ///< ||theta_s - mean theta_B||_inf
    double u_dev = 0.0;      ///< ||u_s||_inf
    double epsilon = 0.0;
    /// (rho_dev + theta_dev + u_dev) / epsilon, zero when epsilon = 0.
    double ratio = 0.0;
};

struct StationaryState {
    FluidState fields;
    double residual_continuity = 0.0;  ///< max norm
    double residual_momentum = 0.0;
    double residual_energy = 0.0;
    double mass_error = 0.0;
    double multiplier = 0.0;  ///< mass multiplier of the Newton solve
    int iterations = 0;
    std::vector<double> trace;  ///< residual max norm per Newton iterate
    Proximity proximity;
};

Proximity proximity(const ProblemConfig& cfg, const Grid& grid, const FluidState& s);

/// Fills the residual norms and the mass error of st from the discrete system.
void evaluate_residuals(const Discretization& disc, double m0, StationaryState& st);

/// rho = m0/|Omega|, theta = theta_B, u = 0. Throws ProblemError unless the
/// wall temperature is constant and G vanishes.
StationaryState static_uniform(const ProblemConfig& cfg, const Grid& grid, const Models& models);

/// Kirchhoff profile theta(z) = K^{-1}((1 - z) K(theta_bottom) + z K(theta_top))
/// sampled at the given heights.
Field solve_heat_profile_1d(const TransportModel& t, double theta_bottom, double theta_top,
                            const std::vector<double>& z);

/// Same profile at the cell centers of a grid (one value per cell).
Field solve_heat_profile(const TransportModel& t, double theta_bottom, double theta_top, const Grid& grid);

struct HydrostaticOptions {
    int substeps = 8;          ///< RK4 steps per cell
    double mass_tol = 1e-10;
};

/// Integrates (dp/drho) rho' = rho g - (dp/dtheta) theta' upward from z = 0
/// with classical RK4 and shoots on rho(0) until the midpoint mass of the
/// cell-center samples equals m0. theta and theta' come from the Kirchhoff
/// profile between the plates. Returns the density at cell centers.
///
/// Throws SolverError if no bracket is found and PositivityError if the
/// integration produces a nonpositive density.
Field solve_hydrostatic_density(const GasModel& gas, const TransportModel& t, double theta_bottom,
                                double theta_top, double g, double m0, const Grid& grid,
                                const HydrostaticOptions& opt = {});

/// Hydrostatic solve for an arbitrary temperature field on the column given by
/// its values and derivative at any height.
template <class Theta, class DTheta>
Field solve_hydrostatic_density(const GasModel& gas, Theta&& theta, DTheta&& dtheta, double g, double m0,
                                const Grid& grid, const HydrostaticOptions& opt = {});

/// Layered Rayleigh-Benard composition: Kirchhoff profile then hydrostatic density.
StationaryState solve_layered_pipeline(const ProblemConfig& cfg, const Grid& grid, const Models& models,
                                       const HydrostaticOptions& opt = {});

struct NewtonOptions {
    double tol = 1e-9;
    int max_iter = 40;
    double min_step = 1.0 / (1 << 20);
    double fd_step = 1e-7;
    /// Keep iterating past tol while the residual still drops by this factor.
    double polish = 0.5;
};

/// Damped Newton on the discrete stationary system (continuity with a mass
/// multiplier, momentum, internal energy) plus the mass constraint. Armijo
/// backtracking on the Euclidean residual norm.
///
/// Throws SolverError on stagnation or nonconvergence and PositivityError if
/// every damped step leaves the positive cone; both carry the residual trace.
StationaryState solve_stationary_newton(const ProblemConfig& cfg, const Discretization& disc,
                                        const FluidState& initial_guess, const NewtonOptions& opt = {});

/// Picks static_uniform, the layered pipeline followed by a Newton polish, or
/// plain Newton from the static state, by name ("static", "pipeline", "newton")
/// or automatically ("auto").
StationaryState solve_stationary(const ProblemConfig& cfg, const Discretization& disc, const std::string& method);

}  // namespace nsf

#include "nsf/detail/hydrostatic.hpp"
