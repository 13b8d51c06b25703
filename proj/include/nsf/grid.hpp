#pragma once

// Staggered (MAC) layout on a 1-D column (0,1) or a 2-D slab T^1 x (0,1).
//
//   scalars rho, theta        cell centers (i, k), i in [0,nx), k in [0,nz)
//   horizontal velocity u     x-faces (i, k), face i sits between cells i-1 and i (periodic)
//   vertical velocity w       z-faces (i, k), k in [1, nz); the wall faces k = 0, nz carry w = 0
//
// A column is the nx = 1 case of the slab: x-differences vanish identically,
// but the horizontal velocity survives as a shear component u(z).

#include <cstddef>
#include <vector>

namespace nsf {

using Field = std::vector<double>;

struct Grid {
    int dimension = 1;
    int nx = 1;
    int nz = 64;
    double lx = 1.0;
    double x0 = 0.0;  ///< left end of the periodic direction

    static Grid column(int nz);
    /// T^1 x (0,1) with T^1 = [-lx/2, lx/2) (the default lx = 2 is the torus [-1,1]).
    static Grid slab(int nx, int nz, double lx = 2.0);

    /// Throws DomainError on nonpositive counts or lengths.
    void check() const;

    double dx() const { return lx / nx; }
    double dz() const { return 1.0 / nz; }
    double cell_volume() const { return dx() * dz(); }
    double volume() const { return lx; }

    std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz); }
    std::size_t x_faces() const { return cells(); }
    std::size_t z_faces() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz - 1); }

    std::size_t cell(int i, int k) const { return static_cast<std::size_t>(k) * nx + static_cast<std::size_t>(wrap(i)); }
    std::size_t x_face(int i, int k) const { return cell(i, k); }
    /// Interior z-face index, valid for 1 <= k <= nz-1.
    std::size_t z_face(int i, int k) const {
        return static_cast<std::size_t>(k - 1) * nx + static_cast<std::size_t>(wrap(i));
    }

    int wrap(int i) const { return ((i % nx) + nx) % nx; }

    double x_center(int i) const { return x0 + (i + 0.5) * dx(); }
    double z_center(int k) const { return (k + 0.5) * dz(); }

    bool operator==(const Grid&) const = default;
};

struct FluidState {
    double t = 0.0;
    Field rho;    ///< cells
    Field theta;  ///< cells
    Field u;      ///< x-faces
    Field w;      ///< interior z-faces

    static FluidState uniform(const Grid& g, double rho, double theta);
    /// Throws DomainError if array sizes do not match the grid.
    void check_shape(const Grid& g) const;
};

/// Wall temperatures, one value per column of cells.
struct BoundaryData {
    Field theta_bottom;
    Field theta_top;
};

/// Potential G sampled at cell centers together with its gradient on the
/// velocity faces (the momentum source is rho grad G).
struct Potential {
    Field cell;
    Field grad_x;  ///< x-faces
    Field grad_z;  ///< interior z-faces
};

}  // namespace nsf
