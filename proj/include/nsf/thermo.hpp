#pragma once

// Constitutive closure for a monoatomic gas with thermal radiation.
//
//   p(rho, theta) = p_inf rho^{5/3} + theta^{5/2} P_m(Z) + (a/3) theta^4
//   e(rho, theta) = (3/2) theta^{5/2} P(Z) / rho + a theta^4 / rho
//   s(rho, theta) = S(Z) + 4 a theta^3 / (3 rho)
//
// with degeneracy parameter Z = rho / theta^{3/2}, P(Z) = p_inf Z^{5/3} + P_m(Z)
// and the entropy kernel S normalized by lim_{Z->inf} S(Z) = 0.

#include <string>
#include <utility>
#include <vector>

namespace nsf {

/// Families of the "molecular" pressure component P_m.
enum class PmFamily {
    Rational,     ///< P_m(Z) = r Z / (1 + Z); closed-form entropy kernel
    Logarithmic,  ///< P_m(Z) = r ln(1 + Z); entropy kernel by quadrature
};

std::string to_string(PmFamily family);
PmFamily pm_family_from_string(const std::string& name);

struct GasModel {
    double p_inf = 1.0;
    double a = 3.0;
    PmFamily pm_family = PmFamily::Rational;
    double pm_gain = 1.0;  ///< r; zero gives the degenerate pure p_inf Z^{5/3} gas
    double z_max_validate = 1.0e3;

    /// Throws DomainError unless p_inf > 0, a > 0, pm_gain >= 0, z_max_validate > 0.
    void check() const;
};

struct TransportModel {
    double mu0 = 1.0;
    double eta0 = 0.0;
    double kappa0 = 1.0;
    double beta = 7.0;

    /// Throws DomainError unless mu0 > 0, eta0 >= 0, kappa0 > 0, beta > 6.
    void check() const;
};

// --- P_m and P ---------------------------------------------------------------

double pm(const GasModel& m, double z);
double pm_prime(const GasModel& m, double z);
double pm_second(const GasModel& m, double z);

double big_p(const GasModel& m, double z);
double big_p_prime(const GasModel& m, double z);
double big_p_second(const GasModel& m, double z);

/// (5/3 P_m(Z) - P_m'(Z) Z) / Z, equal to the same expression in P because the
/// p_inf Z^{5/3} part cancels identically.
double stability_ratio(const GasModel& m, double z);

// --- entropy kernel ----------------------------------------------------------

/// S(Z). Closed form for the rational family, adaptive quadrature of the
/// Third-law tail integral otherwise (throws QuadratureError on divergence).
double entropy_kernel(const GasModel& m, double z);

/// S'(Z) = -(3/2) (5/3 P_m - P_m' Z) / Z^2.
double entropy_kernel_prime(const GasModel& m, double z);

/// Quadrature route for S(Z) regardless of family; exposed so the closed form
/// can be cross-checked.
double entropy_kernel_quadrature(const GasModel& m, double z);

// --- state functions -----------------------------------------------------------

double pressure(const GasModel& m, double rho, double theta);
double internal_energy(const GasModel& m, double rho, double theta);
double entropy(const GasModel& m, double rho, double theta);

/// p_m(rho, theta) = theta^{5/2} P_m(rho / theta^{3/2}).
double molecular_pressure(const GasModel& m, double rho, double theta);

struct Partials {
    double d_rho;
    double d_theta;
};

Partials pressure_partials(const GasModel& m, double rho, double theta);
Partials energy_partials(const GasModel& m, double rho, double theta);
Partials entropy_partials(const GasModel& m, double rho, double theta);
double energy_partial_theta(const GasModel& m, double rho, double theta);

/// d p_m / d theta = (3/2) theta^{3/2} (5/3 P_m(Z) - P_m'(Z) Z) >= 0.
double molecular_pressure_dtheta(const GasModel& m, double rho, double theta);

/// Adiabatic sound speed sqrt(p_rho + theta p_theta^2 / (rho^2 e_theta)).
double sound_speed(const GasModel& m, double rho, double theta);

/// Temperature with rho e(rho, theta) = rho_e. Safeguarded Newton/bisection on
/// the monotone map theta -> e. Returns a negative value if rho_e lies below
/// the zero-temperature limit of rho e.
double recover_temperature(const GasModel& m, double rho, double rho_e, double theta_guess);

struct GibbsResidual {
    double res1;  ///< theta ds/dtheta - de/dtheta
    double res2;  ///< theta ds/drho - (de/drho - p / rho^2)
};

/// Central-difference Gibbs residuals with steps h * max(1, rho) and
/// h * max(1, theta).
GibbsResidual gibbs_residual(const GasModel& m, double rho, double theta, double h);

/// Same residuals from the analytic partial derivatives.
GibbsResidual gibbs_residual_analytic(const GasModel& m, double rho, double theta);

// --- transport -----------------------------------------------------------------

struct TransportCoefficients {
    double mu;
    double eta;
    double kappa;
};

TransportCoefficients transport(const TransportModel& t, double theta);
double viscosity(const TransportModel& t, double theta);
double bulk_viscosity(const TransportModel& t, double theta);
double conductivity(const TransportModel& t, double theta);

/// K(theta) = int_0^theta kappa = kappa0 (theta + theta^{beta+1} / (beta+1)).
double kirchhoff(const TransportModel& t, double theta);

/// Inverse of K on [0, inf). Throws DomainError for negative arguments.
double kirchhoff_inverse(const TransportModel& t, double k);

// --- hypothesis validation -----------------------------------------------------

struct HypothesisReport {
    double c_bound = 0.0;        ///< sup of (5/3 P - P'Z)/Z
    double ratio_min = 0.0;      ///< inf of the same ratio
    double min_second_derivative = 0.0;
    double min_second_difference = 0.0;
    double s_tail_point = 0.0;   ///< Z at which the Third-law tail is probed
    double s_at_zmax = 0.0;      ///< S(s_tail_point)
    std::pair<double, double> pm_prime_range{0.0, 0.0};
    double pm_over_z_tail = 0.0;
    double pm_prime_tail = 0.0;

    bool pass_monotone = false;       ///< P(0) = 0, P' > 0
    bool pass_ratio_bound = false;    ///< 0 < ratio <= c
    bool pass_convexity = false;
    bool pass_third_law = false;
    bool pass_pm_sublinear = false;   ///< P_m >= 0, P_m / Z -> 0
    bool pass_pm_prime_decay = false; ///< -c <= liminf P_m', limsup P_m' = 0
    bool pass_entropy_lower = false;  ///< S(Z) >= (3/2) P_m(Z) / Z

    bool all_pass() const;

    /// Flat "key = value" text block, one entry per line.
    std::string to_key_value() const;
};

/// Log-spaced grid on [z_min, z_max] with n points.
std::vector<double> log_grid(double z_min, double z_max, int n);

/// Default validation grid: 400 log-spaced points on [1e-6 z_max_validate, z_max_validate].
std::vector<double> default_validation_grid(const GasModel& m);

/// Numerically certifies the structural hypotheses on a strictly increasing Z
/// grid. Never throws on hypothesis violations; they show up as failed flags.
HypothesisReport validate_hypotheses(const GasModel& m, const std::vector<double>& grid);

}  // namespace nsf
