// qubit.hpp — reduced density matrix of the dephasing two-level system and
// its exact 2x2 spectral decomposition.

#pragma once

#include <array>
#include <complex>
#include <utility>

#include "gpdephase/errors.hpp"

namespace gpd::qubit {

using Complex = std::complex<double>;

// Initial pure state cos(theta/2)|0> + sin(theta/2)|1> on the Bloch sphere.
struct BlochInitial {
    double theta; // polar angle, in [0, pi]

    explicit BlochInitial(double theta_);
};

// 2x2 Hermitian unit-trace matrix of the qubit at time t (in 1/Omega units).
// Under pure dephasing the populations stay fixed while the coherence is
// attenuated by e^{-F} and rotates with the free precession,
//   rho_10(t) = rho_10(0) e^{-F(t)} e^{-i t}.
// positivity_warning flags attenuations e^{-F} > 1 (possible in the raw
// non-equilibrium mode); the matrix is still returned.
struct ReducedDensity {
    Complex rho00, rho01, rho10, rho11;
    double time_stamp = 0.0;
    bool positivity_warning = false;
};

struct EigenPair {
    double eigenvalue;                     // in [0, 1] for physical states
    std::array<Complex, 2> eigenvector;    // unit norm
};

ReducedDensity reduced_density(const BlochInitial& init, double F, double t);

// Closed-form Hermitian eigendecomposition, ordered by descending eigenvalue,
// gauge fixed so the first nonzero component of each vector is real positive.
// Throws DegeneracyError when the spectrum gap is below 1e-12.
std::pair<EigenPair, EigenPair> eigensystem(const ReducedDensity& rho);

} // namespace gpd::qubit
