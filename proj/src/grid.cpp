#include "nsf/grid.hpp"

#include <sstream>

#include "nsf/errors.hpp"

namespace nsf {

Grid Grid::column(int nz) {
    Grid g;
    g.dimension = 1;
    g.nx = 1;
    g.nz = nz;
    g.lx = 1.0;
    g.x0 = 0.0;
    g.check();
    return g;
}

Grid Grid::slab(int nx, int nz, double lx) {
    Grid g;
    g.dimension = 2;
    g.nx = nx;
    g.nz = nz;
    g.lx = lx;
    g.x0 = -0.5 * lx;
    g.check();
    return g;
}

void Grid::check() const {
    if (dimension != 1 && dimension != 2) throw DomainError("grid dimension must be 1 or 2");
    if (nz < 2) throw DomainError("grid needs at least two cells across the layer");
    if (nx < 1) throw DomainError("grid needs at least one periodic column");
    if (dimension == 1 && nx != 1) throw DomainError("a 1-D column has exactly one periodic column");
    if (!(lx > 0.0)) throw DomainError("periodic length must be positive");
}

FluidState FluidState::uniform(const Grid& g, double rho, double theta) {
    FluidState s;
    s.rho.assign(g.cells(), rho);
    s.theta.assign(g.cells(), theta);
    s.u.assign(g.x_faces(), 0.0);
    s.w.assign(g.z_faces(), 0.0);
    return s;
}

void FluidState::check_shape(const Grid& g) const {
    if (rho.size() != g.cells() || theta.size() != g.cells() || u.size() != g.x_faces() ||
        w.size() != g.z_faces()) {
        std::ostringstream os;
        os << "state arrays (" << rho.size() << ", " << theta.size() << ", " << u.size() << ", "
           << w.size() << ") do not match grid " << g.nx << "x" << g.nz;
        throw DomainError(os.str());
    }
}

}  // namespace nsf
