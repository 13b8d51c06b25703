#pragma once

// Functionals tracked along trajectories: relative energy, ballistic energy,
// entropy production, absorbing-set norms, dissipation and density damping.
// All integrals use the midpoint rule: cell values for scalars, face values
// for velocities.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsf/discretization.hpp"

namespace nsf {

struct Thresholds {
    double theta_low = 0.0;
    double theta_high = 0.0;
    double rho_low = 0.0;
    double rho_high = 0.0;

    /// theta_low = min theta_s / 2, theta_high = 2 max theta_s, same for rho.
    static Thresholds defaults(const FluidState& reference);
    /// Throws DomainError unless 0 < low <= min/2 and 2 max <= high.
    void check(const FluidState& reference) const;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double total_energy = 0.0;
    double relative_energy = 0.0;
    double relative_energy_form_delta = 0.0;
    double ballistic_energy = 0.0;
    double entropy_production_integral = 0.0;
    double norm_rho_53 = 0.0;
    double norm_momentum_54 = 0.0;
    double norm_theta_4 = 0.0;
    double u_h1_sq = 0.0;
    double theta_h1_sq = 0.0;
    double damping_mid = 0.0;
    double damping_high = 0.0;
    double damping_low = 0.0;
    double kappa_weighted_grad_sq = 0.0;       ///< theta outside (theta_low, theta_high)
    double kappa_weighted_grad_diff_sq = 0.0;  ///< theta >= theta_low, gradient relative to reference
    double total_entropy = 0.0;
    /// Time integrals from the start of the run (trapezoid over accepted steps).
    double entropy_production_time_integral = 0.0;
    double boundary_entropy_flux_time_integral = 0.0;
    double ballistic_source_time_integral = 0.0;
    long steps = 0;
    double dt = 0.0;

    static const std::vector<std::string>& columns();
    std::vector<double> values() const;
};

/// CSV header and rows with round-trip (%.17g) precision.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& r);

// --- energies ------------------------------------------------------------------

/// Kinetic energy 1/2 int rho |u - u_ref|^2 on the velocity faces.
double kinetic_energy(const Discretization& d, const FluidState& s, const FluidState* ref = nullptr);

/// int (1/2 rho |u|^2 + rho e).
double total_energy(const Discretization& d, const FluidState& s);

/// int rho s.
double total_entropy(const Discretization& d, const FluidState& s);

/// Per-cell thermal part of the relative energy, first form:
///   rho e - theta~ (rho s - rho~ s~) - (e~ - theta~ s~ + p~/rho~)(rho - rho~) - rho~ e~
double relative_energy_density(const GasModel& m, double rho, double theta, double rho_r, double theta_r);
/// Same quantity in the second form:
///   rho e - theta~ rho s - (e~ - theta~ s~ + p~/rho~) rho + p~
double relative_energy_density_alt(const GasModel& m, double rho, double theta, double rho_r, double theta_r,
                                   double pressure_shift = 0.0);

/// Relative energy E(rho, theta, u | reference), first form.
double relative_energy(const Discretization& d, const FluidState& s, const FluidState& ref);

/// First form minus second form. pressure_shift is added to the reference
/// pressure of the second form only (sensitivity checks).
double relative_energy_form_delta(const Discretization& d, const FluidState& s, const FluidState& ref,
                                  double pressure_shift = 0.0);

/// int (1/2 rho |u|^2 + rho e - theta~ rho s). theta_tilde lives on cells; its
/// wall trace (second-order extrapolation) must match theta_B within trace_tol
/// relative, else DomainError.
double ballistic_energy(const Discretization& d, const FluidState& s, const Field& theta_tilde,
                        double trace_tol = 1e-3);

// --- entropy production -----------------------------------------------------------

struct EntropyProduction {
    Field field;          ///< per cell, >= 0
    double integral = 0.0;
    double viscous = 0.0; ///< int S:D / theta
    double heat = 0.0;    ///< heat conduction part
};

/// sigma = S : D u / theta + q . grad(1/theta). The heat part is evaluated on
/// faces with the scheme's flux q = -Delta K / Delta and split half to each
/// adjacent cell, so it is nonnegative face by face.
EntropyProduction entropy_production(const Discretization& d, const FluidState& s);

/// Net entropy outflow through the walls, oint q . n / theta_B.
double boundary_entropy_flux(const Discretization& d, const FluidState& s);

/// Right-hand side rate of the ballistic energy inequality with theta~ = ref.theta:
///   int rho grad G . u - int rho s u . grad theta~ - int (theta~/theta) S : D u - int q . grad(theta~/theta)
double ballistic_source(const Discretization& d, const FluidState& s, const FluidState& ref);

// --- norms, dissipation and damping ---------------------------------------------------

struct AbsorbingNorms {
    double norm_momentum_54 = 0.0;
    double norm_rho_53 = 0.0;
    double norm_theta_4 = 0.0;
};

AbsorbingNorms absorbing_norms(const Discretization& d, const FluidState& s);

struct DissipationFunctionals {
    double u_h1_sq = 0.0;
    double theta_h1_sq = 0.0;
    double kappa_weighted_grad_sq = 0.0;
    double kappa_weighted_grad_diff_sq = 0.0;
};

DissipationFunctionals dissipation_functionals(const Discretization& d, const FluidState& s,
                                               const FluidState& ref, const Thresholds& th);

/// int kappa(theta)/theta^2 |grad theta|^2 over {theta >= high}, {low < theta < high},
/// {theta <= low} and in total.
std::array<double, 4> kappa_weighted_partition(const Discretization& d, const FluidState& s, const Thresholds& th);

/// Cell-centered temperature gradient: central differences inside, second-order
/// one-sided stencils through the wall value at the walls.
void temperature_gradient(const Discretization& d, const Field& theta, Field& gx, Field& gz);

struct DampingFunctionals {
    double mid = 0.0;   ///< int_{rho_low <= rho <= rho_high} (rho - rho_s)^2
    double high = 0.0;  ///< int_{rho > rho_high} rho^{5/3}
    double low = 0.0;   ///< |{rho < rho_low}|
};

DampingFunctionals damping_functionals(const Discretization& d, const FluidState& s, const FluidState& ref,
                                       const Thresholds& th);

/// Measures of the three density regions; they sum to |Omega|.
std::array<double, 3> damping_region_measures(const Discretization& d, const FluidState& s, const Thresholds& th);

// --- records and inequality residuals --------------------------------------------------

/// Instantaneous part of a record (everything except the time integrals and counters).
DiagnosticsRecord evaluate_record(const Discretization& d, const FluidState& s, const FluidState& ref,
                                  const Thresholds& th);

struct InequalityResiduals {
    /// Delta int rho s - int (int sigma - oint q.n/theta_B) dt; >= -tol when consistent.
    double entropy_residual = 0.0;
    /// int ballistic_source dt - Delta ballistic energy; >= -tol when consistent.
    double ballistic_residual = 0.0;
};

/// Residuals between the first and last record of the window. Throws
/// DomainError if the window has fewer than two records.
InequalityResiduals inequality_residuals(const std::vector<DiagnosticsRecord>& window);

}  // namespace nsf
