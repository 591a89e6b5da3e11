// envmodels.hpp — environment descriptors for a dephasing two-level system
// and their decoherence factors F(t), diffusion coefficients D(t) and
// non-Markovianity diagnostics.
//
// All quantities are nondimensionalized by the system frequency Omega:
// times are Omega*t, frequencies omega/Omega, temperatures k_B T/(hbar Omega).
//
// Descriptors are immutable values; every operation is pure. The intended
// usage is concurrent evaluation over (s, t) grids.

#pragma once

#include "gpdephase/numerics.hpp"

namespace gpd::envmodels {

// Power-law spectral density with exponential cutoff,
//   I(w) = gamma0 * w^s / cutoff^{s-1} * exp(-w/cutoff).
// s < 1 is sub-ohmic, s = 1 ohmic, s > 1 super-ohmic.
struct SpectralDensity {
    double gamma0;   // dimensionless coupling, >= 0
    double s;        // ohmicity, > -1
    double cutoff;   // reservoir frequency cutoff in units of Omega, > 0

    SpectralDensity(double gamma0_, double s_, double cutoff_);
};

// Equilibrium bath of harmonic oscillators at temperature T >= 0.
struct ThermalEnv {
    SpectralDensity spectral;
    double temperature = 0.0;

    ThermalEnv(SpectralDensity sd, double temperature_ = 0.0);
};

// Non-stationary (non-equilibrium) bath producing a fluctuating transition
// frequency; lambda_param and d_param shape the transient. The decoherence
// factor formula carries a spurious offset at t = 0; `rebased` subtracts it
// so the coherence attenuation starts at exactly 1 (the default). Raw mode
// keeps the literal formula for regression purposes.
struct NonEqEnv {
    SpectralDensity spectral;
    double lambda_param;   // in units of 1/Omega
    double d_param;        // in units of Omega, > 0
    bool rebased = true;

    NonEqEnv(SpectralDensity sd, double lambda_, double d_, bool rebased_ = true);
};

struct MarkovReport {
    std::string environment_kind;            // "thermal" | "noneq"
    numerics::SignChangeReport negative_intervals;
    bool is_markovian_on_window = true;
};

double spectral_density_eval(const SpectralDensity& sd, double omega);

// Exact zero-temperature decoherence factor,
//   F(t) = 4 gamma0 Gamma(s)/(s-1) [1 - (1+L^2 t^2)^{-s/2}
//            (cos(s atan(L t)) + L t sin(s atan(L t)))].
// Within |s - s0| < 1e-3 of the removable prefactor poles s0 in {0, 1} the
// value falls back to the quadrature route.
double thermal_F_closed(const ThermalEnv& env, double t);

// Decoherence factor by adaptive quadrature,
//   F(t) = 4 integral_0^inf dw I(w) coth(w/(2T)) (1 - cos(w t)) / w^2,
// with coth -> 1 at T = 0. Requires s > -1 (T = 0) or s > 0 (T > 0).
double thermal_F_quadrature(const ThermalEnv& env, double t);

// Diffusion coefficient D(t) = dF/dt / 2 from the analytic derivative of the
// zero-T closed form; smooth over the whole domain s > -1.
double thermal_D(const ThermalEnv& env, double t);

// Literal- or rebased-mode decoherence factor of the non-equilibrium bath.
double noneq_F(const NonEqEnv& env, double t);

// D(t) = dF/dt / 2 by the hand-coded analytic derivative (rebasing shifts F
// by a constant, so the derivative is mode-independent).
double noneq_D(const NonEqEnv& env, double t);

MarkovReport markovianity_report(const ThermalEnv& env, double t_max, int samples);
MarkovReport markovianity_report(const NonEqEnv& env, double t_max, int samples);

} // namespace gpd::envmodels
