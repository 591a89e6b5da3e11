#include "doctest.h"

#include <cmath>

#include "gpdephase/envmodels.hpp"

using namespace gpd;
using namespace gpd::envmodels;
namespace num = gpd::numerics;

namespace {
constexpr double kPi = 3.14159265358979323846;
double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
ThermalEnv thermal(double g0, double s, double L, double T = 0.0) {
    return ThermalEnv(SpectralDensity(g0, s, L), T);
}
NonEqEnv noneq(double g0, double s, double L, double lam, double d, bool rebased = true) {
    return NonEqEnv(SpectralDensity(g0, s, L), lam, d, rebased);
}
} // namespace

TEST_CASE("spectral density evaluation") {
    SpectralDensity sd(0.1, 1.0, 10.0);
    CHECK(rel_err(spectral_density_eval(sd, 1.0), 0.1 * std::exp(-0.1)) < 1e-14);
    CHECK(spectral_density_eval(SpectralDensity(1.0, 2.0, 5.0), 0.0) == 0.0);
    // s = 0: gamma0 * cutoff limit at the origin
    CHECK(rel_err(spectral_density_eval(SpectralDensity(1.0, 0.0, 2.0), 0.0), 2.0) < 1e-14);
    CHECK(rel_err(spectral_density_eval(SpectralDensity(1.0, 0.0, 2.0), 1e-9), 2.0) < 1e-8);
    CHECK_THROWS_AS(spectral_density_eval(SpectralDensity(1.0, -0.5, 2.0), 0.0), DomainError);
    CHECK_THROWS_AS(spectral_density_eval(sd, -1.0), DomainError);
}

TEST_CASE("spectral density domain validation") {
    CHECK_THROWS_AS(SpectralDensity(-0.1, 1.0, 10.0), DomainError);
    CHECK_THROWS_AS(SpectralDensity(0.1, -2.0, 10.0), DomainError);
    CHECK_THROWS_AS(SpectralDensity(0.1, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(ThermalEnv(SpectralDensity(0.1, 1.0, 10.0), -0.1), DomainError);
    CHECK_THROWS_AS(NonEqEnv(SpectralDensity(0.1, 1.0, 10.0), 0.3, 0.0), DomainError);
}

TEST_CASE("thermal F closed form basics") {
    CHECK(thermal_F_closed(thermal(0.1, 4.0, 10.0), 0.0) == 0.0);
    // long-time plateau 4 gamma0 Gamma(4)/3 = 0.8
    CHECK(rel_err(thermal_F_closed(thermal(0.1, 4.0, 10.0), 1e3), 0.8) < 1e-9);
    CHECK_THROWS_AS(thermal_F_closed(thermal(0.1, 4.0, 10.0), -1.0), DomainError);
    CHECK_THROWS_AS(thermal_F_closed(thermal(0.1, 4.0, 10.0, 0.5), 1.0), DomainError);
}

TEST_CASE("thermal F closed form vs quadrature oracle") {
    for (double s : {-0.5, 0.5, 0.999, 1.001, 2.0, 3.0, 4.0}) {
        ThermalEnv env = thermal(0.1, s, 10.0);
        for (double t : {0.01, 0.1, 0.5, 1.0, 5.0}) {
            const double closed = thermal_F_closed(env, t);
            const double quad = thermal_F_quadrature(env, t);
            CHECK(rel_err(closed, quad) < 1e-6);
        }
    }
    // the 20 x 6 grid of the stated invariant, coarser per-point check
    for (double s : {-0.5, 0.5, 1.0, 2.0, 3.0, 4.0}) {
        ThermalEnv env = thermal(0.1, s, 10.0);
        for (int i = 1; i <= 20; ++i) {
            const double t = 0.02 * i * i; // 0.02 .. 8
            CHECK(rel_err(thermal_F_closed(env, t), thermal_F_quadrature(env, t)) < 1e-6);
        }
    }
}

TEST_CASE("thermal F quadrature near the plateau") {
    // Lambda t = 50 >> 1: within 1e-3 of the asymptote
    CHECK(std::abs(thermal_F_quadrature(thermal(0.1, 4.0, 10.0), 5.0) - 0.8) < 1e-3);
    CHECK(thermal_F_quadrature(thermal(0.1, 4.0, 10.0), 0.0) == 0.0);
}

TEST_CASE("thermal F at finite temperature") {
    // coth(w/2T) > 1 strictly, so F(T>0) > F(T=0)
    ThermalEnv cold = thermal(0.1, 2.0, 10.0);
    ThermalEnv warm = thermal(0.1, 2.0, 10.0, 1.0);
    for (double t : {0.1, 0.5, 2.0}) {
        CHECK(thermal_F_quadrature(warm, t) > thermal_F_quadrature(cold, t));
    }
    // independent composite-Simpson oracle (regular integrand at s = 2)
    {
        const double g0 = 0.1, s = 2.0, L = 10.0, T = 1.0, t = 0.5;
        auto f = [&](double w) {
            if (w == 0.0) return 0.0;
            const double cth = 1.0 / std::tanh(w / (2.0 * T));
            return std::pow(w, s - 2.0) * std::exp(-w / L) * cth * (1.0 - std::cos(w * t));
        };
        const double b = 40.0 * L;
        const int n = 400000; // even
        const double h = b / n;
        double acc = f(0.0) + f(b);
        for (int i = 1; i < n; ++i) acc += f(i * h) * ((i % 2) ? 4.0 : 2.0);
        const double simpson = 4.0 * g0 * std::pow(L, 1.0 - s) * acc * h / 3.0;
        CHECK(rel_err(thermal_F_quadrature(warm, t), simpson) < 1e-6);
    }
    CHECK_THROWS_AS(thermal_F_quadrature(thermal(0.1, -0.5, 10.0, 1.0), 0.5), DomainError);
}

TEST_CASE("thermal F nonnegative and monotonicity structure") {
    for (double s : {-0.5, 0.5, 1.0, 2.0, 3.0, 4.0}) {
        for (double g0 : {0.01, 0.1}) {
            for (double L : {5.0, 10.0}) {
                ThermalEnv env = thermal(g0, s, L);
                for (double t = 0.01; t < 50.0; t *= 2.3) {
                    CHECK(thermal_F_closed(env, t) >= 0.0);
                }
            }
        }
    }
    // F monotone non-decreasing for s <= 2 (D >= 0), non-monotone for s = 4
    for (double s : {0.5, 1.0, 2.0}) {
        ThermalEnv env = thermal(0.1, s, 10.0);
        for (double t = 0.01; t < 50.0; t *= 1.5) CHECK(thermal_D(env, t) >= 0.0);
    }
    bool saw_negative = false;
    ThermalEnv s4 = thermal(0.1, 4.0, 10.0);
    for (double t = 0.01; t < 50.0; t *= 1.2) saw_negative |= (thermal_D(s4, t) < 0.0);
    CHECK(saw_negative);
}

TEST_CASE("thermal D values and oracle") {
    ThermalEnv env = thermal(0.1, 4.0, 10.0);
    CHECK(thermal_D(env, 0.0) == 0.0);
    // analytic derivative against the finite-difference of the closed form
    for (double t : {0.05, 0.3, 1.7}) {
        const double fd = num::derivative([&](double u) { return thermal_F_closed(env, u); }, t);
        CHECK(rel_err(thermal_D(env, t), 0.5 * fd) < 1e-6);
    }
    // sign change exactly where s * atan(L t) = pi: t* = tan(pi/4)/10
    const double tstar = std::tan(kPi / 4.0) / 10.0;
    CHECK(thermal_D(env, tstar - 1e-6) > 0.0);
    CHECK(thermal_D(env, tstar + 1e-6) < 0.0);
    CHECK(rel_err(tstar, 0.1) < 1e-12);
    // ohmic bath: D > 0 for all t > 0
    ThermalEnv ohmic = thermal(0.1, 1.0, 10.0);
    for (double t = 1e-3; t < 100.0; t *= 1.7) CHECK(thermal_D(ohmic, t) > 0.0);
}

TEST_CASE("fundamental theorem closure: 2 int D = F") {
    for (double s : {-0.5, 0.7, 2.5, 4.0}) {
        ThermalEnv env = thermal(0.1, s, 10.0);
        for (double t : {0.3, 2.0}) {
            auto r = num::integrate_interval([&](double u) { return thermal_D(env, u); }, 0.0, t,
                                             {1e-11, 1e-14, 4000});
            CHECK(rel_err(2.0 * r.value, thermal_F_closed(env, t)) < 1e-6);
        }
    }
}

TEST_CASE("noneq F raw and rebased modes") {
    NonEqEnv raw = noneq(0.1, 2.0, 10.0, 0.3, 2.0, false);
    NonEqEnv reb = noneq(0.1, 2.0, 10.0, 0.3, 2.0, true);
    CHECK(noneq_F(raw, 0.0) == 1.0);
    CHECK(noneq_F(reb, 0.0) == 0.0);
    // modes differ by exactly raw(0) at every t
    for (double t = 0.0; t < 4.0; t += 0.37) {
        CHECK(std::abs(noneq_F(raw, t) - noneq_F(reb, t) - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(noneq_F(reb, -0.5), DomainError);
}

TEST_CASE("noneq F dip deepens with s") {
    // Fixed (gamma0, L, lambda, d): dip depth (max - min over the window)
    // non-decreasing over s in {1, 2, 3}
    double depth_prev = -1.0;
    for (double s : {1.0, 2.0, 3.0}) {
        NonEqEnv env = noneq(0.1, s, 10.0, 0.3, 2.0);
        double lo = 1e300, hi = -1e300;
        bool nonmono = false;
        double prev = noneq_F(env, 0.0);
        double prev_step = 0.0;
        for (double t = 0.005; t <= 3.0; t += 0.005) {
            const double v = noneq_F(env, t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            const double step = v - prev;
            if (prev_step < 0.0 && step > 0.0) nonmono = true;
            if (prev_step > 0.0 && step < 0.0) nonmono = true;
            prev_step = step;
            prev = v;
        }
        CHECK(nonmono);
        const double depth = hi - lo;
        CHECK(depth >= depth_prev);
        depth_prev = depth;
    }
}

TEST_CASE("noneq D against finite differences") {
    for (double s : {1.0, 2.0, 3.0}) {
        NonEqEnv env = noneq(0.1, s, 10.0, 0.3, 2.0, false);
        for (double t : {0.1, 0.3, 0.9, 2.4}) {
            const double fd = num::derivative([&](double u) { return noneq_F(env, u); }, t);
            CHECK(rel_err(noneq_D(env, t), 0.5 * fd) < 1e-6);
        }
    }
}

TEST_CASE("noneq D negative windows and hierarchy") {
    double min_prev = 1e300;
    for (double s : {1.0, 2.0, 3.0}) {
        NonEqEnv env = noneq(0.1, s, 10.0, 0.3, 2.0);
        auto rep = num::find_sign_changes([&](double t) { return noneq_D(env, t); }, 0.0, 3.0, 1024);
        CHECK(!rep.intervals.empty());
        double dmin = 1e300;
        for (double t = 1e-4; t <= 3.0; t += 1e-3) dmin = std::min(dmin, noneq_D(env, t));
        CHECK(dmin < 0.0);
        CHECK(dmin < min_prev); // more negative as s grows
        min_prev = dmin;
    }
}

TEST_CASE("markovianity reports") {
    auto ohmic = markovianity_report(thermal(0.1, 1.0, 10.0), 10.0, 2048);
    CHECK(ohmic.is_markovian_on_window);
    CHECK(ohmic.environment_kind == "thermal");

    auto super = markovianity_report(thermal(0.1, 4.0, 10.0), 10.0, 2048);
    CHECK(!super.is_markovian_on_window);
    REQUIRE(super.negative_intervals.first_crossing.has_value());
    CHECK(std::abs(*super.negative_intervals.first_crossing - 0.1) < 1e-6);

    auto nq = markovianity_report(noneq(0.1, 1.0, 10.0, 0.3, 2.0), 3.0, 2048);
    CHECK(!nq.is_markovian_on_window);

    CHECK_THROWS_AS(markovianity_report(thermal(0.1, 1.0, 10.0), -1.0, 64), DomainError);
}
