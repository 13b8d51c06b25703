#pragma once

// Semi-implicit time stepping of the evolutionary system on the staggered grid.
//
// One step, from (rho, theta, v) at t to t + dt:
//   1. rho' = rho - dt div(rho u)                               (conservative upwind)
//   2. internal energy: explicit transport and S : D u - p div u at t,
//      implicit Fourier diffusion as a Newton solve in K = K(theta')
//   3. momentum: explicit advection, pressure p(rho', theta') and potential,
//      implicit viscous stress with mu, eta frozen at theta^n
// Walls enter through ghost values only, so u = 0 and theta = theta_B hold
// by construction.

#include <chrono>
#include <functional>
#include <optional>
#include <vector>

#include "nsf/diagnostics.hpp"
#include "nsf/discretization.hpp"
#include "nsf/stationary.hpp"

namespace nsf {

struct StepControl {
    double cfl_target = 0.4;
    double dt_min = 1e-9;
    double dt_max = 0.05;
    int max_retries = 30;
    /// When false every step attempts dt_max (retries still halve it).
    bool adaptive = true;

    /// Throws DomainError unless 0 < cfl_target < 1, 0 < dt_min < dt_max, max_retries >= 0.
    void check() const;
};

/// cfl_target * min over cells of h / (|v| + c_s), clamped to [dt_min, dt_max].
/// In 1-D h = dz and |v| = max(|u_c|, |w_c|); in 2-D the two directions are
/// limited separately with their own spacing and velocity component. Face
/// velocities enter through the larger magnitude of the two faces of a cell.
double cfl_dt(const Discretization& d, const FluidState& s, const StepControl& control);

struct HeatSolveOptions {
    double tol = 1e-10;  ///< relative to max(1, max |E*|)
    int max_iter = 50;
};

struct StepStats {
    int heat_iterations = 0;
    double heat_residual = 0.0;  ///< max norm of the energy residual after the solve
};

/// One step of size dt. Throws PositivityError (retriable) when rho or theta
/// would leave the positive cone and SolverError when the implicit heat solve
/// does not converge.
FluidState step(const Discretization& d, const FluidState& s, double dt, StepStats* stats = nullptr,
                const HeatSolveOptions& heat = {});

struct RunOptions {
    double horizon = 1.0;
    StepControl control;
    /// Time between diagnostics records (records are also written at t0 and at
    /// the horizon). Steps are shortened to land on record times exactly.
    double record_interval = 0.1;
    /// Time between snapshots, 0 for initial and final only.
    double snapshot_interval = 0.0;
    /// Defaults to Thresholds::defaults(reference) when empty.
    std::optional<Thresholds> thresholds;
    /// Abort with SolverError after this many accepted steps (0 = no limit).
    long max_steps = 0;
};

struct RunSinks {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(const FluidState&)> on_snapshot;
};

struct RunSummary {
    FluidState final_state;
    long steps = 0;
    long retries = 0;
    double wall_seconds = 0.0;
    std::vector<DiagnosticsRecord> records;
};

/// Advances initial to t0 + horizon. Each failed step is retried with half
/// the step down to dt_min; after that the error propagates. Time integrals
/// of entropy production, boundary entropy flux and the ballistic source are
/// accumulated by the trapezoid rule over accepted steps.
RunSummary run(const Discretization& d, const FluidState& initial, const StationaryState& reference,
               const RunOptions& options, const RunSinks& sinks = {});

}  // namespace nsf
