#include "nsf/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex(const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) throw DomainError("snapshot: bad number '" + tok + "'");
    return v;
}

void write_array(std::ostream& os, const char* name, const Field& f) {
    os << name << ' ' << f.size() << '\n';
    for (double v : f) os << hex(v) << '\n';
}

std::string expect_key(std::istream& is, const char* key) {
    std::string k, v;
    if (!(is >> k >> v) || k != key) throw DomainError(std::string("snapshot: expected '") + key + "'");
    return v;
}

Field read_array(std::istream& is, const char* name) {
    const std::size_t n = std::stoul(expect_key(is, name));
    Field f(n);
    std::string tok;
    for (auto& v : f) {
        if (!(is >> tok)) throw DomainError(std::string("snapshot: truncated array ") + name);
        v = parse_hex(tok);
    }
    return f;
}

}  // namespace

void write_snapshot(std::ostream& os, const Grid& grid, const FluidState& s) {
    s.check_shape(grid);
    os << "nsf-snapshot 1\n"
       << "dimension " << grid.dimension << '\n'
       << "nx " << grid.nx << '\n'
       << "nz " << grid.nz << '\n'
       << "lx " << hex(grid.lx) << '\n'
       << "x0 " << hex(grid.x0) << '\n'
       << "t " << hex(s.t) << '\n';
    write_array(os, "rho", s.rho);
    write_array(os, "theta", s.theta);
    write_array(os, "u", s.u);
    write_array(os, "w", s.w);
}

void write_snapshot(const std::string& path, const Grid& grid, const FluidState& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_snapshot(os, grid, s);
    if (!os) throw std::runtime_error("write to " + path + " failed");
}

Snapshot read_snapshot(std::istream& is) {
    if (expect_key(is, "nsf-snapshot") != "1") throw DomainError("snapshot: unsupported version");
    Snapshot snap;
    try {
        snap.grid.dimension = std::stoi(expect_key(is, "dimension"));
        snap.grid.nx = std::stoi(expect_key(is, "nx"));
        snap.grid.nz = std::stoi(expect_key(is, "nz"));
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const DomainError*>(&e)) throw;
        throw DomainError("snapshot: bad grid header");
    }
    snap.grid.lx = parse_hex(expect_key(is, "lx"));
    snap.grid.x0 = parse_hex(expect_key(is, "x0"));
    snap.grid.check();
    snap.state.t = parse_hex(expect_key(is, "t"));
    snap.state.rho = read_array(is, "rho");
    snap.state.theta = read_array(is, "theta");
    snap.state.u = read_array(is, "u");
    snap.state.w = read_array(is, "w");
    snap.state.check_shape(snap.grid);
    return snap;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("cannot open snapshot " + path);
    return read_snapshot(is);
}

}  // namespace nsf
