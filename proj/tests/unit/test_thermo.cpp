#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nsf/errors.hpp"
#include "nsf/thermo.hpp"

using namespace nsf;

namespace {

GasModel default_gas() { return GasModel{}; }

// Gauss-Legendre nodes on [-1,1] by Newton on P_n; kept independent of the
// library's quadrature.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

// S(Z) = int_Z^inf (3/2)(5/3 P_m(s) - P_m'(s) s)/s^2 ds for P_m = s/(1+s),
// integrated in y = ln s with composite Gauss-Legendre; remainder beyond the
// cut is the leading 5/2 e^{-y} term.
double entropy_kernel_oracle(double z) {
    static const GaussLegendre gl(12);
    auto f = [](double y) {
        double s = std::exp(y);
        double num = 5.0 / 3.0 * s / (1.0 + s) - s / ((1.0 + s) * (1.0 + s));
        return 1.5 * num / s;
    };
    double y0 = std::log(z), y1 = y0 + 45.0;
    int panels = 900;
    double h = (y1 - y0) / panels, sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        double c = y0 + (p + 0.5) * h;
        for (std::size_t i = 0; i < gl.x.size(); ++i) sum += 0.5 * h * gl.w[i] * f(c + 0.5 * h * gl.x[i]);
    }
    return sum + 2.5 * std::exp(-y1);
}

double kirchhoff_inverse_bisect(double k) {
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double km = mid + std::pow(mid, 8.0) / 8.0;
        (km < k ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Pressure, HandEvaluatedStates) {
    auto m = default_gas();
    EXPECT_NEAR(pressure(m, 1.0, 1.0), 2.5, 1e-15);
    EXPECT_NEAR(pressure(m, 2.0, 1.0), std::pow(2.0, 5.0 / 3.0) + 2.0 / 3.0 + 1.0, 1e-14);
    EXPECT_NEAR(pressure(m, 2.0, 1.0), 4.84147, 1e-5);
}

TEST(Pressure, RadiationFloorAtVanishingDensity) {
    auto m = default_gas();
    EXPECT_NEAR(pressure(m, 1e-14, 1.0), m.a / 3.0, 1e-12);
}

TEST(Pressure, RejectsNonpositiveArguments) {
    auto m = default_gas();
    EXPECT_THROW(pressure(m, 0.0, 1.0), DomainError);
    EXPECT_THROW(pressure(m, 1.0, -1.0), DomainError);
    EXPECT_THROW(internal_energy(m, -1.0, 1.0), DomainError);
    EXPECT_THROW(entropy(m, 1.0, 0.0), DomainError);
}

TEST(Pressure, ThreeTermDecomposition) {
    auto m = default_gas();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-3.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double rho = std::pow(10.0, d(gen)), theta = std::pow(10.0, d(gen));
        double sum = m.p_inf * std::pow(rho, 5.0 / 3.0) + molecular_pressure(m, rho, theta) +
                     m.a / 3.0 * std::pow(theta, 4);
        EXPECT_NEAR(pressure(m, rho, theta), sum, 4e-16 * sum);
    }
}

TEST(InternalEnergy, HandEvaluatedState) {
    auto m = default_gas();
    EXPECT_NEAR(internal_energy(m, 1.0, 1.0), 5.25, 1e-14);
}

TEST(InternalEnergy, VanishesWithTemperature) {
    GasModel m = default_gas();
    m.p_inf = 1e-300;
    EXPECT_LT(internal_energy(m, 1.0, 1e-6), 1e-8);
}

TEST(InternalEnergy, IncreasesWithTemperature) {
    auto m = default_gas();
    EXPECT_GT(internal_energy(m, 1.0, 1.1), internal_energy(m, 1.0, 1.0));
}

TEST(Entropy, HandEvaluatedState) {
    auto m = default_gas();
    EXPECT_NEAR(entropy(m, 1.0, 1.0), std::log(2.0) + 0.75 + 4.0, 1e-14);
    EXPECT_NEAR(entropy(m, 1.0, 1.0), 5.4431, 1e-4);
}

TEST(Entropy, ClosedFormMatchesIndependentQuadrature) {
    auto m = default_gas();
    for (double z : log_grid(1e-4, 1e4, 100)) {
        double oracle = entropy_kernel_oracle(z);
        EXPECT_NEAR(entropy_kernel(m, z), oracle, 1e-10 * std::max(1.0, oracle)) << "Z=" << z;
    }
}

TEST(Entropy, LibraryQuadratureMatchesClosedForm) {
    auto m = default_gas();
    for (double z : log_grid(1e-4, 1e4, 100)) {
        double exact = entropy_kernel(m, z);
        EXPECT_NEAR(entropy_kernel_quadrature(m, z), exact, 1e-10 * std::max(1.0, exact)) << "Z=" << z;
    }
}

TEST(Entropy, ThirdLawTail) {
    auto m = default_gas();
    double s = entropy_kernel(m, 1e6);
    EXPECT_NEAR(s, std::log1p(1e-6) + 1.5 / (1.0 + 1e6), 1e-20);
    EXPECT_NEAR(s, 2.5e-6, 1e-11);
}

TEST(Entropy, KernelDecreasingAndBoundedBelow) {
    for (auto fam : {PmFamily::Rational, PmFamily::Logarithmic}) {
        GasModel m;
        m.pm_family = fam;
        auto zs = log_grid(1e-3, 1e3, 60);
        double prev = entropy_kernel(m, zs.front());
        for (std::size_t i = 0; i < zs.size(); ++i) {
            double s = entropy_kernel(m, zs[i]);
            if (i > 0) EXPECT_LT(s, prev) << to_string(fam) << " Z=" << zs[i];
            EXPECT_GE(s, 1.5 * pm(m, zs[i]) / zs[i] * (1.0 - 1e-12)) << to_string(fam) << " Z=" << zs[i];
            prev = s;
        }
    }
}

TEST(Entropy, KernelDerivativeMatchesDifferences) {
    GasModel m;
    m.pm_family = PmFamily::Logarithmic;
    for (double z : {0.01, 0.5, 3.0, 40.0}) {
        double h = 1e-4 * z;
        double fd = (entropy_kernel(m, z + h) - entropy_kernel(m, z - h)) / (2 * h);
        EXPECT_NEAR(entropy_kernel_prime(m, z), fd, 1e-6 * std::abs(fd));
    }
}

TEST(PressurePartials, HandEvaluatedDensityDerivative) {
    auto m = default_gas();
    auto pp = pressure_partials(m, 1.0, 1.0);
    EXPECT_NEAR(pp.d_rho, 5.0 / 3.0 + 0.25, 1e-14);
    EXPECT_NEAR(pp.d_rho, 1.9167, 1e-4);
}

TEST(PressurePartials, PositiveOnRandomStates) {
    auto m = default_gas();
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> d(1e-3, 10.0);
    for (int i = 0; i < 10000; ++i) {
        double rho = d(gen), theta = d(gen);
        ASSERT_GT(pressure_partials(m, rho, theta).d_rho, 0.0);
        ASSERT_GT(energy_partial_theta(m, rho, theta), 0.0);
        ASSERT_GE(molecular_pressure_dtheta(m, rho, theta), 0.0);
    }
}

TEST(PressurePartials, SecondOrderDifferenceConsistency) {
    auto m = default_gas();
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.0}, std::pair{5.0, 0.4}}) {
        auto pp = pressure_partials(m, rho, theta);
        double err[2];
        for (int j = 0; j < 2; ++j) {
            double h = 1e-2 / (1 << j);
            double fd = (pressure(m, rho + h, theta) - pressure(m, rho - h, theta)) / (2 * h);
            err[j] = std::abs(fd - pp.d_rho);
        }
        EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
        for (int j = 0; j < 2; ++j) {
            double h = 1e-2 / (1 << j);
            double fd = (pressure(m, rho, theta + h) - pressure(m, rho, theta - h)) / (2 * h);
            err[j] = std::abs(fd - pp.d_theta);
        }
        EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
    }
}

TEST(EnergyPartials, SecondOrderDifferenceConsistency) {
    auto m = default_gas();
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.0}, std::pair{5.0, 0.4}}) {
        double et = energy_partial_theta(m, rho, theta);
        double err[2];
        for (int j = 0; j < 2; ++j) {
            double h = 1e-2 / (1 << j);
            double fd = (internal_energy(m, rho, theta + h) - internal_energy(m, rho, theta - h)) / (2 * h);
            err[j] = std::abs(fd - et);
        }
        EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
        auto ep = energy_partials(m, rho, theta);
        EXPECT_DOUBLE_EQ(ep.d_theta, et);
        double h = 1e-5;
        double fd = (internal_energy(m, rho + h, theta) - internal_energy(m, rho - h, theta)) / (2 * h);
        EXPECT_NEAR(ep.d_rho, fd, 1e-7 * std::max(1.0, std::abs(fd)));
    }
}

TEST(EnergyPartials, RadiationDominatedRegime) {
    auto m = default_gas();
    double rho = 1e-3, theta = 10.0;
    double approx = 4.0 * m.a * theta * theta * theta / rho;
    EXPECT_NEAR(energy_partial_theta(m, rho, theta), approx, 0.05 * approx);
}

TEST(EntropyPartials, MatchDifferences) {
    auto m = default_gas();
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.0}}) {
        auto sp = entropy_partials(m, rho, theta);
        double h = 1e-5;
        double fr = (entropy(m, rho + h, theta) - entropy(m, rho - h, theta)) / (2 * h);
        double ft = (entropy(m, rho, theta + h) - entropy(m, rho, theta - h)) / (2 * h);
        EXPECT_NEAR(sp.d_rho, fr, 1e-8 * std::abs(fr));
        EXPECT_NEAR(sp.d_theta, ft, 1e-8 * std::abs(ft));
    }
}

TEST(MolecularPressure, TemperatureDerivativeMatchesDifferences) {
    auto m = default_gas();
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.2}}) {
        double h = 1e-5;
        double fd = (molecular_pressure(m, rho, theta + h) - molecular_pressure(m, rho, theta - h)) / (2 * h);
        EXPECT_NEAR(molecular_pressure_dtheta(m, rho, theta), fd, 1e-8);
    }
}

TEST(SoundSpeed, UnitState) {
    auto m = default_gas();
    double pr = 5.0 / 3.0 + 0.25;
    double pt = 1.5 * (2.0 / 3.0 + 5.0 / 3.0) / 4.0 + 4.0;  // (3/2) Z ratio + (4a/3) theta^3
    double et = 2.25 * (1.0 / 4.0) * (2.0 / 3.0 + 5.0 / 3.0) + 12.0;
    EXPECT_NEAR(sound_speed(m, 1.0, 1.0), std::sqrt(pr + pt * pt / et), 1e-14);
}

TEST(Gibbs, DefaultStateBelowThreshold) {
    auto m = default_gas();
    auto r = gibbs_residual(m, 1.0, 1.0, 1e-4);
    EXPECT_LT(std::abs(r.res1), 1e-6);
    EXPECT_LT(std::abs(r.res2), 1e-6);
}

TEST(Gibbs, HalvingGivesFourfoldReduction) {
    auto m = default_gas();
    auto a = gibbs_residual(m, 1.0, 1.0, 1e-2);
    auto b = gibbs_residual(m, 1.0, 1.0, 5e-3);
    EXPECT_NEAR(a.res1 / b.res1, 4.0, 0.2);
    EXPECT_NEAR(a.res2 / b.res2, 4.0, 0.2);
}

TEST(Gibbs, AnalyticResidualVanishesWithoutMolecularPart) {
    GasModel m = default_gas();
    m.pm_gain = 0.0;
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{0.2, 3.0}, std::pair{7.0, 0.5}}) {
        auto r = gibbs_residual_analytic(m, rho, theta);
        double scale = std::abs(energy_partial_theta(m, rho, theta)) + std::abs(pressure(m, rho, theta));
        EXPECT_LE(std::abs(r.res1), 8 * std::numeric_limits<double>::epsilon() * scale);
        EXPECT_LE(std::abs(r.res2), 8 * std::numeric_limits<double>::epsilon() * scale);
    }
}

TEST(Gibbs, LogFamilyConverges) {
    GasModel m;
    m.pm_family = PmFamily::Logarithmic;
    auto a = gibbs_residual(m, 0.7, 1.3, 1e-2);
    auto b = gibbs_residual(m, 0.7, 1.3, 5e-3);
    EXPECT_NEAR(a.res1 / b.res1, 4.0, 0.3);
    EXPECT_NEAR(a.res2 / b.res2, 4.0, 0.3);
}

TEST(RecoverTemperature, RoundTrip) {
    auto m = default_gas();
    for (auto [rho, theta] : {std::pair{1.0, 1.0}, std::pair{1e-2, 5.0}, std::pair{10.0, 0.05}}) {
        double re = rho * internal_energy(m, rho, theta);
        double th = recover_temperature(m, rho, re, 1.0);
        EXPECT_NEAR(rho * internal_energy(m, rho, th), re, 4e-15 * re);
        EXPECT_NEAR(th, theta, 1e-10 * theta);
    }
    EXPECT_LT(recover_temperature(m, 1.0, 1.0, 1.0), 0.0);  // below 1.5 p_inf rho^{5/3}
}

TEST(Transport, UnitTemperature) {
    TransportModel t;
    auto c = transport(t, 1.0);
    EXPECT_EQ(c.mu, 2.0);
    EXPECT_EQ(c.eta, 0.0);
    EXPECT_EQ(c.kappa, 2.0);
    EXPECT_EQ(conductivity(t, 2.0), 129.0);
    EXPECT_GT(conductivity(t, 1.01), conductivity(t, 1.0));
    EXPECT_THROW(transport(t, 0.0), DomainError);
}

TEST(Transport, RejectsSmallExponent) {
    TransportModel t;
    t.beta = 6.0;
    EXPECT_THROW(t.check(), DomainError);
}

TEST(Kirchhoff, InverseMatchesBisection) {
    TransportModel t;
    for (double k : {1e-6, 0.3, 1.125, 2.0, 50.0}) {
        EXPECT_NEAR(kirchhoff_inverse(t, k), kirchhoff_inverse_bisect(k), 1e-14);
        EXPECT_NEAR(kirchhoff(t, kirchhoff_inverse(t, k)), k, 1e-14 * std::max(1.0, k));
    }
    EXPECT_EQ(kirchhoff_inverse(t, 0.0), 0.0);
    EXPECT_THROW(kirchhoff_inverse(t, -1.0), DomainError);
}

TEST(Validator, DefaultModelPasses) {
    auto m = default_gas();
    auto r = validate_hypotheses(m, default_validation_grid(m));
    EXPECT_TRUE(r.all_pass()) << r.to_key_value();
    // sup of (2/3 + 5Z/3)/(1+Z)^2 sits at Z = 1/5
    EXPECT_NEAR(r.c_bound, 25.0 / 36.0, 1e-10);
    EXPECT_LE(r.c_bound, 5.0 / 3.0);
    EXPECT_GT(r.min_second_derivative, 0.0);
    EXPECT_GT(r.min_second_difference, 0.0);
}

TEST(Validator, RatioMaximumAgreesWithDenseSampling) {
    auto m = default_gas();
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        double z = 1e-3 * i / 20.0;
        if (z <= 0.0) continue;
        best = std::max(best, (2.0 / 3.0 + 5.0 * z / 3.0) / ((1 + z) * (1 + z)));
    }
    auto r = validate_hypotheses(m, default_validation_grid(m));
    EXPECT_NEAR(r.c_bound, best, 1e-9);
}

TEST(Validator, DegenerateModelFailsRatioBound) {
    GasModel m = default_gas();
    m.pm_gain = 0.0;
    auto r = validate_hypotheses(m, default_validation_grid(m));
    EXPECT_FALSE(r.pass_ratio_bound);
    EXPECT_FALSE(r.all_pass());
}

TEST(Validator, LogFamilyPasses) {
    GasModel m;
    m.pm_family = PmFamily::Logarithmic;
    auto r = validate_hypotheses(m, default_validation_grid(m));
    EXPECT_TRUE(r.all_pass()) << r.to_key_value();
}

TEST(Validator, ReportSerializesEveryFlag) {
    auto m = default_gas();
    auto text = validate_hypotheses(m, default_validation_grid(m)).to_key_value();
    for (const char* key : {"c_bound", "min_second_derivative", "s_at_zmax", "pass_third_law", "pass_convexity"})
        EXPECT_NE(text.find(key), std::string::npos) << key;
}
