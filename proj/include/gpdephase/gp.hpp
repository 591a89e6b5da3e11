// gp.hpp — open-system geometric phase of the dephasing qubit over one
// quasi-cycle t in [0, tau], tau = 2 pi / Omega, plus the closed-system
// reference phase and weak-coupling perturbative corrections.
//
// The phase functional is evaluated in its gauge-invariant discrete
// (Pancharatnam) form: the eigenvector branches of the reduced density matrix
// are tracked along a uniform grid, the open-path connection is accumulated
// as a chain of node-to-node overlaps, and the branch sum is weighted by
// sqrt(eps_k(0) eps_k(tau)).

#pragma once

#include <variant>

#include "gpdephase/envmodels.hpp"
#include "gpdephase/qubit.hpp"

namespace gpd::gp {

using EnvVariant = std::variant<envmodels::ThermalEnv, envmodels::NonEqEnv>;

struct GpResult {
    double phi_g = 0.0;            // geometric phase, principal branch [0, 2 pi)
    double phi_u = 0.0;            // closed-system reference pi (1 - cos theta)
    double delta_phi = 0.0;        // phi_g - phi_u
    double normalized_delta = 0.0; // delta_phi / phi_u (0 when phi_u = 0)
    int grid_points = 0;           // nodes behind the reported value
    double richardson_gap = 0.0;   // |change| of phi_g under grid doubling
};

struct GpRun {
    qubit::BlochInitial init;
    EnvVariant env;
    double period = 2.0 * 3.14159265358979323846;
    int grid = 4096;
};

// pi (1 - cos theta)
double gp_unitary(const qubit::BlochInitial& init);

// Evaluates the phase functional at run.grid and 2x run.grid nodes; raises
// ConvergenceError if the doubling gap reaches 1e-6 rad, DegeneracyError if
// the eigenbranches collapse along the path. theta in {0, pi} short-circuits
// to phi_g = phi_u (no path is traversed on the Bloch sphere).
GpResult gp_evaluate(const GpRun& run);

// First-order coefficient of the thermal zero-T correction. Removable poles
// at s in {0, 1, 2} are crossed by averaging symmetric evaluations around the
// pole (window 1e-3, offsets clamped to at least 1e-4).
double correction_thermal_perturbative(const envmodels::SpectralDensity& sd,
                                       const qubit::BlochInitial& init);

// gamma0 * Gamma(s+1) * sin^2(theta) * cos(theta)
double correction_noneq_perturbative(const envmodels::SpectralDensity& sd,
                                     const qubit::BlochInitial& init);

} // namespace gpd::gp
