#pragma once

// Text snapshots with hexadecimal floating point, so a write/read cycle is
// bit exact. Layout:
//
//   nsf-snapshot 1
//   dimension <int>
//   nx <int>
//   nz <int>
//   lx <hex>
//   x0 <hex>
//   t <hex>
//   rho <count>
//   <hex> ...            one value per line
//   theta <count> ...
//   u <count> ...
//   w <count> ...

#include <iosfwd>
#include <string>

#include "nsf/grid.hpp"

namespace nsf {

struct Snapshot {
    Grid grid;
    FluidState state;
};

void write_snapshot(std::ostream& os, const Grid& grid, const FluidState& s);
void write_snapshot(const std::string& path, const Grid& grid, const FluidState& s);

/// Throws DomainError on malformed input or arrays that do not match the grid.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

}  // namespace nsf
