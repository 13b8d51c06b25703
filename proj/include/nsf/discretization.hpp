#pragma once

// Spatial operators on the staggered grid. The time stepper and the
// stationary solver are both written in terms of these, so a discrete
// stationary state is an exact fixed point of the stepper.
//
// Velocities are packed as v = [u (x-faces); w (interior z-faces)].

#include <Eigen/SparseCore>

#include "nsf/grid.hpp"
#include "nsf/thermo.hpp"

namespace nsf {

enum class Reconstruction { Upwind, Minmod };

std::string to_string(Reconstruction r);
Reconstruction reconstruction_from_string(const std::string& name);

struct Models {
    GasModel gas;
    TransportModel transport;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Mass fluxes F = rho u on all faces. fz includes both walls (always zero).
struct MassFlux {
    Field fx;  ///< x-faces
    Field fz;  ///< z-faces, size nx (nz + 1), index k nx + i
};

/// Pieces of the stationary residual, each on its own layout.
struct StationaryResidual {
    Field continuity;  ///< cells
    Field momentum;    ///< packed velocity faces
    Field energy;      ///< cells
};

class Discretization {
public:
    Discretization(Grid grid, Models models, BoundaryData bc, Potential g,
                   Reconstruction recon = Reconstruction::Upwind);

    const Grid& grid() const { return grid_; }
    const Models& models() const { return models_; }
    const BoundaryData& boundary() const { return bc_; }
    const Potential& potential() const { return g_; }
    Reconstruction reconstruction() const { return recon_; }

    std::size_t velocity_size() const { return grid_.x_faces() + grid_.z_faces(); }
    Field pack_velocity(const FluidState& s) const;
    void unpack_velocity(const Field& v, FluidState& s) const;

    /// Face densities (mean of the two adjacent cells) on the packed layout.
    Field face_density(const Field& rho) const;
    /// Face volumes on the packed layout.
    double face_volume() const { return grid_.cell_volume(); }

    MassFlux mass_flux(const FluidState& s) const;
    /// Divergence of a face flux.
    Field divergence(const MassFlux& f) const;
    /// Divergence of F q with q reconstructed upwind of F (minmod if enabled).
    Field transport_divergence(const MassFlux& f, const Field& q) const;

    /// Cell-centered div u.
    Field velocity_divergence(const FluidState& s) const;
    /// Cell-centered S(theta, D u) : D u with viscosities from theta_visc.
    Field dissipation(const FluidState& s, const Field& theta_visc) const;
    /// Viscous operator v -> div S(theta, D v), symmetric negative semidefinite.
    SparseMatrix viscous_matrix(const Field& theta) const;
    /// Applies viscous_matrix(theta) to v without assembling it.
    Field viscous_apply(const Field& theta, const Field& v) const;

    /// div q for the Kirchhoff field Kc = K(theta) at cells: heat_matrix() Kc - heat_boundary().
    Field heat_divergence(const Field& kc) const;
    const SparseMatrix& heat_matrix() const { return heat_; }
    const Field& heat_boundary() const { return heat_b_; }
    /// Kirchhoff values of the wall temperatures.
    const Field& k_bottom() const { return k_bottom_; }
    const Field& k_top() const { return k_top_; }
    /// Heat flux -Delta K / Delta on z-faces (walls included), index k nx + i.
    Field vertical_heat_flux(const Field& kc) const;
    /// Heat flux on x-faces.
    Field horizontal_heat_flux(const Field& kc) const;

    /// Explicit momentum forces on the packed layout:
    ///   -rho_f (v . grad) v - grad p + rho_f grad G
    /// with the convective velocity taken from s and the densities from rho.
    Field momentum_forces(const FluidState& s, const Field& rho, const Field& p) const;

    /// Discrete stationary system with a mass multiplier lambda added to the
    /// continuity rows:
    ///   div(rho u) + lambda,
    ///   rho (u . grad) u + grad p - rho grad G - div S,
    ///   div(rho e u) + div q - S : D u + p div u.
    StationaryResidual stationary_residual(const FluidState& s, double lambda = 0.0) const;

    Field pressure_field(const Field& rho, const Field& theta) const;
    Field energy_field(const Field& rho, const Field& theta) const;
    Field kirchhoff_field(const Field& theta) const;

    double total_mass(const Field& rho) const;

private:
    Grid grid_;
    Models models_;
    BoundaryData bc_;
    Potential g_;
    Reconstruction recon_;
    SparseMatrix heat_;
    Field heat_b_;
    Field k_bottom_, k_top_;

    double face_value(double flux, const Field& q, std::size_t upw, std::size_t dnw, std::size_t far, bool has_far) const;
};

}  // namespace nsf
