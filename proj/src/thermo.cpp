#include "nsf/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "nsf/detail/roots.hpp"
#include "nsf/errors.hpp"

namespace nsf {

namespace {

void require_state(double rho, double theta) {
    if (!(rho > 0.0) || !(theta > 0.0) || !std::isfinite(rho) || !std::isfinite(theta)) {
        std::ostringstream os;
        os << "thermodynamic state out of domain: rho=" << rho << ", theta=" << theta;
        throw DomainError(os.str());
    }
}

void require_z(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        std::ostringstream os;
        os << "degeneracy parameter out of domain: Z=" << z;
        throw DomainError(os.str());
    }
}

double degeneracy(double rho, double theta) { return rho / (theta * std::sqrt(theta)); }

// Third-law tail integral is truncated here first; the truncation point moves
// outward while the power-law remainder estimate is not negligible.
constexpr double kTailCut = 1.0e8;
constexpr double kTailRelTol = 1.0e-12;
constexpr double kQuadTol = 1.0e-12;

}  // namespace

std::string to_string(PmFamily family) {
    switch (family) {
        case PmFamily::Rational: return "rational";
        case PmFamily::Logarithmic: return "log";
    }
    return "unknown";
}

PmFamily pm_family_from_string(const std::string& name) {
    if (name == "rational") return PmFamily::Rational;
    if (name == "log") return PmFamily::Logarithmic;
    throw DomainError("unknown P_m family '" + name + "' (expected rational or log)");
}

void GasModel::check() const {
    if (!(p_inf > 0.0)) throw DomainError("p_inf must be positive");
    if (!(a > 0.0)) throw DomainError("radiation constant a must be positive");
    if (!(pm_gain >= 0.0)) throw DomainError("P_m gain must be nonnegative");
    if (!(z_max_validate > 0.0)) throw DomainError("z_max_validate must be positive");
}

void TransportModel::check() const {
    if (!(mu0 > 0.0)) throw DomainError("mu0 must be positive");
    if (!(eta0 >= 0.0)) throw DomainError("eta0 must be nonnegative");
    if (!(kappa0 > 0.0)) throw DomainError("kappa0 must be positive");
    if (!(beta > 6.0)) throw DomainError("beta must exceed 6");
}

double pm(const GasModel& m, double z) {
    switch (m.pm_family) {
        case PmFamily::Rational: return m.pm_gain * z / (1.0 + z);
        case PmFamily::Logarithmic: return m.pm_gain * std::log1p(z);
    }
    return 0.0;
}

double pm_prime(const GasModel& m, double z) {
    switch (m.pm_family) {
        case PmFamily::Rational: return m.pm_gain / ((1.0 + z) * (1.0 + z));
        case PmFamily::Logarithmic: return m.pm_gain / (1.0 + z);
    }
    return 0.0;
}

double pm_second(const GasModel& m, double z) {
    switch (m.pm_family) {
        case PmFamily::Rational: return -2.0 * m.pm_gain / ((1.0 + z) * (1.0 + z) * (1.0 + z));
        case PmFamily::Logarithmic: return -m.pm_gain / ((1.0 + z) * (1.0 + z));
    }
    return 0.0;
}

double big_p(const GasModel& m, double z) { return m.p_inf * std::pow(z, 5.0 / 3.0) + pm(m, z); }

double big_p_prime(const GasModel& m, double z) {
    return 5.0 / 3.0 * m.p_inf * std::pow(z, 2.0 / 3.0) + pm_prime(m, z);
}

double big_p_second(const GasModel& m, double z) {
    return 10.0 / 9.0 * m.p_inf * std::pow(z, -1.0 / 3.0) + pm_second(m, z);
}

double stability_ratio(const GasModel& m, double z) {
    switch (m.pm_family) {
        case PmFamily::Rational:
            return m.pm_gain * (2.0 / 3.0 + 5.0 / 3.0 * z) / ((1.0 + z) * (1.0 + z));
        case PmFamily::Logarithmic:
            return (5.0 / 3.0 * pm(m, z) - pm_prime(m, z) * z) / z;
    }
    return 0.0;
}

double entropy_kernel_prime(const GasModel& m, double z) {
    require_z(z);
    return -1.5 * stability_ratio(m, z) / z;
}

double entropy_kernel_quadrature(const GasModel& m, double z) {
    require_z(z);
    using boost::math::quadrature::gauss_kronrod;
    // In y = ln s the integrand (5/3 P_m - P_m' s) / s^2 ds becomes ratio(e^y) dy.
    auto integrand = [&](double y) { return stability_ratio(m, std::exp(y)); };

    double lower = std::log(z);
    double cut = std::max(kTailCut, 100.0 * z);
    double total = 0.0;
    for (int pass = 0; pass < 40; ++pass) {
        double upper = std::log(cut);
        double err = 0.0;
        total += gauss_kronrod<double, 31>::integrate(integrand, lower, upper, 25, kQuadTol, &err);
        if (!std::isfinite(total)) throw QuadratureError("entropy tail integral is not finite");

        // Local power-law fit ratio ~ s^{-gamma} gives the remainder ratio(cut)/gamma.
        double r1 = stability_ratio(m, cut);
        double r0 = stability_ratio(m, 0.5 * cut);
        if (r1 == 0.0) return 1.5 * total;
        if (!(r0 > 0.0) || !(r1 > 0.0)) {
            throw QuadratureError("entropy tail integrand changes sign; P_m violates the stability bound");
        }
        double gamma = std::log(r0 / r1) / std::log(2.0);
        if (gamma > 0.05) {
            double remainder = r1 / gamma;
            if (remainder <= kTailRelTol * std::abs(total)) return 1.5 * (total + remainder);
        }
        lower = upper;
        cut *= 1.0e8;
        if (!(cut < 1.0e250)) break;
    }
    throw QuadratureError("entropy tail integral did not converge; P_m violates the Third law");
}

double entropy_kernel(const GasModel& m, double z) {
    require_z(z);
    switch (m.pm_family) {
        case PmFamily::Rational:
            return m.pm_gain * (std::log1p(1.0 / z) + 1.5 / (1.0 + z));
        case PmFamily::Logarithmic:
            return entropy_kernel_quadrature(m, z);
    }
    return 0.0;
}

double pressure(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double t2 = theta * theta;
    return m.p_inf * std::pow(rho, 5.0 / 3.0) + molecular_pressure(m, rho, theta) + m.a / 3.0 * t2 * t2;
}

double molecular_pressure(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    return theta * theta * std::sqrt(theta) * pm(m, degeneracy(rho, theta));
}

double internal_energy(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double t2 = theta * theta;
    return 1.5 * m.p_inf * std::pow(rho, 2.0 / 3.0) +
           1.5 * t2 * std::sqrt(theta) * pm(m, degeneracy(rho, theta)) / rho + m.a * t2 * t2 / rho;
}

double entropy(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    return entropy_kernel(m, degeneracy(rho, theta)) + 4.0 * m.a / (3.0 * rho) * theta * theta * theta;
}

Partials pressure_partials(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double z = degeneracy(rho, theta);
    double t15 = theta * std::sqrt(theta);
    return {5.0 / 3.0 * m.p_inf * std::pow(rho, 2.0 / 3.0) + theta * pm_prime(m, z),
            1.5 * t15 * z * stability_ratio(m, z) + 4.0 * m.a / 3.0 * theta * theta * theta};
}

Partials energy_partials(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double z = degeneracy(rho, theta);
    double t2 = theta * theta;
    double t25 = t2 * std::sqrt(theta);
    double d_rho = m.p_inf * std::pow(rho, -1.0 / 3.0) +
                   1.5 * (theta * pm_prime(m, z) / rho - t25 * pm(m, z) / (rho * rho)) -
                   m.a * t2 * t2 / (rho * rho);
    double d_theta = 2.25 * stability_ratio(m, z) + 4.0 * m.a * t2 * theta / rho;
    return {d_rho, d_theta};
}

double energy_partial_theta(const GasModel& m, double rho, double theta) {
    return energy_partials(m, rho, theta).d_theta;
}

Partials entropy_partials(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double z = degeneracy(rho, theta);
    double sp = entropy_kernel_prime(m, z);
    double t3 = theta * theta * theta;
    return {sp / (theta * std::sqrt(theta)) - 4.0 * m.a * t3 / (3.0 * rho * rho),
            -1.5 * z * sp / theta + 4.0 * m.a * theta * theta / rho};
}

double molecular_pressure_dtheta(const GasModel& m, double rho, double theta) {
    require_state(rho, theta);
    double z = degeneracy(rho, theta);
    return 1.5 * theta * std::sqrt(theta) * (5.0 / 3.0 * pm(m, z) - pm_prime(m, z) * z);
}

double sound_speed(const GasModel& m, double rho, double theta) {
    auto dp = pressure_partials(m, rho, theta);
    double de = energy_partial_theta(m, rho, theta);
    return std::sqrt(dp.d_rho + theta * dp.d_theta * dp.d_theta / (rho * rho * de));
}

double recover_temperature(const GasModel& m, double rho, double rho_e, double theta_guess) {
    require_state(rho, 1.0);
    double target = rho_e / rho;
    double e_floor = 1.5 * m.p_inf * std::pow(rho, 2.0 / 3.0);
    if (!(target > e_floor)) return -1.0;

    double hi = (theta_guess > 0.0 && std::isfinite(theta_guess)) ? theta_guess : 1.0;
    while (internal_energy(m, rho, hi) < target) {
        hi *= 2.0;
        if (!std::isfinite(hi)) return -1.0;
    }
    double lo = 0.0;
    auto f = [&](double th) {
        if (th <= 0.0) return std::pair{e_floor - target, 0.0};
        return std::pair{internal_energy(m, rho, th) - target, energy_partial_theta(m, rho, th)};
    };
    double x0 = (theta_guess > 0.0 && theta_guess < hi) ? theta_guess : hi;
    return detail::safeguarded_newton(f, lo, hi, x0);
}

GibbsResidual gibbs_residual(const GasModel& m, double rho, double theta, double h) {
    require_state(rho, theta);
    if (!(h > 0.0)) throw DomainError("Gibbs residual step must be positive");
    double hr = h * std::max(1.0, rho);
    double ht = h * std::max(1.0, theta);
    if (hr >= rho || ht >= theta) throw DomainError("Gibbs residual step too large for the state");

    double ds_dt = (entropy(m, rho, theta + ht) - entropy(m, rho, theta - ht)) / (2.0 * ht);
    double de_dt = (internal_energy(m, rho, theta + ht) - internal_energy(m, rho, theta - ht)) / (2.0 * ht);
    double ds_dr = (entropy(m, rho + hr, theta) - entropy(m, rho - hr, theta)) / (2.0 * hr);
    double de_dr = (internal_energy(m, rho + hr, theta) - internal_energy(m, rho - hr, theta)) / (2.0 * hr);
    double p = pressure(m, rho, theta);
    return {theta * ds_dt - de_dt, theta * ds_dr - (de_dr - p / (rho * rho))};
}

GibbsResidual gibbs_residual_analytic(const GasModel& m, double rho, double theta) {
    auto s = entropy_partials(m, rho, theta);
    auto e = energy_partials(m, rho, theta);
    double p = pressure(m, rho, theta);
    return {theta * s.d_theta - e.d_theta, theta * s.d_rho - (e.d_rho - p / (rho * rho))};
}

// --- transport ---------------------------------------------------------------------

namespace {
void require_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        std::ostringstream os;
        os << "temperature out of domain: theta=" << theta;
        throw DomainError(os.str());
    }
}
}  // namespace

double viscosity(const TransportModel& t, double theta) { return t.mu0 * (1.0 + theta); }
double bulk_viscosity(const TransportModel& t, double theta) { return t.eta0 * (1.0 + theta); }
double conductivity(const TransportModel& t, double theta) {
    return t.kappa0 * (1.0 + std::pow(theta, t.beta));
}

TransportCoefficients transport(const TransportModel& t, double theta) {
    require_theta(theta);
    return {viscosity(t, theta), bulk_viscosity(t, theta), conductivity(t, theta)};
}

double kirchhoff(const TransportModel& t, double theta) {
    return t.kappa0 * (theta + std::pow(theta, t.beta + 1.0) / (t.beta + 1.0));
}

double kirchhoff_inverse(const TransportModel& t, double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
        std::ostringstream os;
        os << "Kirchhoff variable out of range: K=" << k;
        throw DomainError(os.str());
    }
    if (k == 0.0) return 0.0;
    double kk = k / t.kappa0;
    // K(theta)/kappa0 dominates both theta and theta^{beta+1}/(beta+1).
    double hi = std::min(kk, std::pow((t.beta + 1.0) * kk, 1.0 / (t.beta + 1.0)));
    auto f = [&](double th) {
        return std::pair{kirchhoff(t, th) - k, conductivity(t, th)};
    };
    return detail::safeguarded_newton(f, 0.0, hi * (1.0 + 1e-15), hi);
}

// --- hypothesis validation -------------------------------------------------------

bool HypothesisReport::all_pass() const {
    return pass_monotone && pass_ratio_bound && pass_convexity && pass_third_law &&
           pass_pm_sublinear && pass_pm_prime_decay && pass_entropy_lower;
}

std::string HypothesisReport::to_key_value() const {
    std::ostringstream os;
    os.precision(17);
    os << "c_bound = " << c_bound << '\n'
       << "ratio_min = " << ratio_min << '\n'
       << "min_second_derivative = " << min_second_derivative << '\n'
       << "min_second_difference = " << min_second_difference << '\n'
       << "s_tail_point = " << s_tail_point << '\n'
       << "s_at_zmax = " << s_at_zmax << '\n'
       << "pm_prime_min = " << pm_prime_range.first << '\n'
       << "pm_prime_max = " << pm_prime_range.second << '\n'
       << "pm_over_z_tail = " << pm_over_z_tail << '\n'
       << "pm_prime_tail = " << pm_prime_tail << '\n'
       << "pass_monotone = " << (pass_monotone ? "true" : "false") << '\n'
       << "pass_ratio_bound = " << (pass_ratio_bound ? "true" : "false") << '\n'
       << "pass_convexity = " << (pass_convexity ? "true" : "false") << '\n'
       << "pass_third_law = " << (pass_third_law ? "true" : "false") << '\n'
       << "pass_pm_sublinear = " << (pass_pm_sublinear ? "true" : "false") << '\n'
       << "pass_pm_prime_decay = " << (pass_pm_prime_decay ? "true" : "false") << '\n'
       << "pass_entropy_lower = " << (pass_entropy_lower ? "true" : "false") << '\n'
       << "all_pass = " << (all_pass() ? "true" : "false") << '\n';
    return os.str();
}

std::vector<double> log_grid(double z_min, double z_max, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    double l0 = std::log(z_min), l1 = std::log(z_max);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (n - 1));
    g.back() = z_max;
    return g;
}

std::vector<double> default_validation_grid(const GasModel& m) {
    return log_grid(1.0e-6 * m.z_max_validate, m.z_max_validate, 400);
}

HypothesisReport validate_hypotheses(const GasModel& m, const std::vector<double>& grid) {
    HypothesisReport r;
    if (grid.size() < 3 || !(grid.front() > 0.0) ||
        !std::is_sorted(grid.begin(), grid.end(), [](double x, double y) { return x <= y; })) {
        return r;  // every flag stays false
    }
    const std::size_t n = grid.size();
    const double z_end = grid.back();

    // (5/3 P - P'Z)/Z over the grid, with the grid maximum polished by a local
    // bracketed search so the reported constant is the supremum, not a sample.
    double ratio_max = -std::numeric_limits<double>::infinity();
    double ratio_min = std::numeric_limits<double>::infinity();
    std::size_t i_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double q = stability_ratio(m, grid[i]);
        if (q > ratio_max) {
            ratio_max = q;
            i_max = i;
        }
        ratio_min = std::min(ratio_min, q);
    }
    if (i_max > 0 && i_max + 1 < n) {
        auto neg = [&](double y) { return -stability_ratio(m, std::exp(y)); };
        auto best = boost::math::tools::brent_find_minima(neg, std::log(grid[i_max - 1]),
                                                          std::log(grid[i_max + 1]), 52);
        ratio_max = std::max(ratio_max, -best.second);
    }
    r.c_bound = ratio_max;
    r.ratio_min = ratio_min;
    r.pass_ratio_bound = ratio_min > 0.0 && std::isfinite(ratio_max);

    bool p_increasing = big_p(m, 0.0) == 0.0 && big_p_prime(m, 0.0) > 0.0;
    for (double z : grid) p_increasing = p_increasing && big_p_prime(m, z) > 0.0;
    r.pass_monotone = p_increasing;

    double min_p2 = std::numeric_limits<double>::infinity();
    for (double z : grid) min_p2 = std::min(min_p2, big_p_second(m, z));
    double min_dd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double z0 = grid[i - 1], z1 = grid[i], z2 = grid[i + 1];
        double d01 = (big_p(m, z1) - big_p(m, z0)) / (z1 - z0);
        double d12 = (big_p(m, z2) - big_p(m, z1)) / (z2 - z1);
        min_dd = std::min(min_dd, 2.0 * (d12 - d01) / (z2 - z0));
    }
    r.min_second_derivative = min_p2;
    r.min_second_difference = min_dd;
    r.pass_convexity = min_p2 > 0.0 && min_dd > 0.0;

    double pp_min = std::numeric_limits<double>::infinity();
    double pp_max = -std::numeric_limits<double>::infinity();
    bool pm_nonneg = true;
    for (double z : grid) {
        double d = pm_prime(m, z);
        pp_min = std::min(pp_min, d);
        pp_max = std::max(pp_max, d);
        pm_nonneg = pm_nonneg && pm(m, z) > 0.0;
    }
    r.pm_prime_range = {pp_min, pp_max};

    // Asymptotic properties are probed three decades beyond the grid.
    const double z_tail = 1.0e3 * z_end;
    const double pm0 = pm_prime(m, 0.0);
    r.s_tail_point = z_tail;
    r.pm_over_z_tail = pm(m, z_tail) / z_tail;
    r.pm_prime_tail = pm_prime(m, z_tail);
    r.pass_pm_sublinear = pm_nonneg && pm0 > 0.0 && r.pm_over_z_tail <= 1.0e-3 * pm0;
    r.pass_pm_prime_decay = pm0 > 0.0 && std::abs(r.pm_prime_tail) <= 1.0e-3 * pm0 &&
                            pp_min >= -r.c_bound;

    try {
        double s_ref = entropy_kernel(m, 1.0);
        r.s_at_zmax = entropy_kernel(m, z_tail);
        bool decreasing = true;
        bool lower = true;
        double prev = std::numeric_limits<double>::infinity();
        for (double z : grid) {
            double s = entropy_kernel(m, z);
            decreasing = decreasing && s < prev;
            lower = lower && s >= 1.5 * pm(m, z) / z * (1.0 - 1e-12);
            prev = s;
        }
        r.pass_third_law = decreasing && r.s_at_zmax >= 0.0 && s_ref > 0.0 &&
                           r.s_at_zmax <= 1.0e-3 * s_ref;
        r.pass_entropy_lower = lower && pm_nonneg;
    } catch (const QuadratureError&) {
        r.pass_third_law = false;
        r.pass_entropy_lower = false;
    }
    return r;
}

}  // namespace nsf
