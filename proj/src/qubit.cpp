#include "gpdephase/qubit.hpp"

#include <cmath>

namespace gpd::qubit {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHermTol = 1e-12;
} // namespace

BlochInitial::BlochInitial(double theta_) : theta(theta_) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw DomainError("BlochInitial: theta must lie in [0, pi]");
}

ReducedDensity reduced_density(const BlochInitial& init, double F, double t) {
    if (t < 0.0) throw DomainError("reduced_density: time must be >= 0");
    const double c = std::cos(init.theta / 2.0);
    const double s = std::sin(init.theta / 2.0);
    const double atten = std::exp(-F);
    ReducedDensity rho;
    rho.rho00 = c * c;
    rho.rho11 = s * s;
    rho.rho10 = c * s * atten * std::polar(1.0, -t);
    rho.rho01 = std::conj(rho.rho10);
    rho.time_stamp = t;
    rho.positivity_warning = atten > 1.0 + 1e-12;
    return rho;
}

std::pair<EigenPair, EigenPair> eigensystem(const ReducedDensity& rho) {
    const double a = rho.rho00.real();
    const double d = rho.rho11.real();
    if (std::abs(rho.rho00.imag()) > kHermTol || std::abs(rho.rho11.imag()) > kHermTol ||
        std::abs(rho.rho01 - std::conj(rho.rho10)) > kHermTol)
        throw DomainError("eigensystem: matrix is not Hermitian");
    if (std::abs(a + d - 1.0) > kHermTol)
        throw DomainError("eigensystem: trace must equal 1");

    const Complex b = rho.rho01;
    const double bn = std::abs(b);
    const double gap = std::sqrt((a - d) * (a - d) + 4.0 * bn * bn);
    if (gap < 1e-12)
        throw DegeneracyError("eigensystem: degenerate spectrum", rho.time_stamp);

    const double ep = 0.5 * (1.0 + gap);
    const double em = 0.5 * (1.0 - gap);

    EigenPair plus, minus;
    plus.eigenvalue = ep;
    minus.eigenvalue = em;
    if (bn == 0.0) {
        // diagonal matrix; order by eigenvalue
        if (a >= d) {
            plus.eigenvector = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
            minus.eigenvector = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
        } else {
            plus.eigenvector = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
            minus.eigenvector = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
        }
        return {plus, minus};
    }
    // (rho - e) v = 0 with v = (e - d, conj(b)); first component of the upper
    // branch is (a - d + gap)/2 > 0, gauge-ready as is
    {
        const double v0 = ep - d;
        const Complex v1 = std::conj(b);
        const double n = std::sqrt(v0 * v0 + bn * bn);
        plus.eigenvector = {Complex(v0 / n, 0.0), v1 / n};
    }
    {
        const double v0 = d - em; // sign flipped to keep the first component positive
        const Complex v1 = -std::conj(b);
        const double n = std::sqrt(v0 * v0 + bn * bn);
        minus.eigenvector = {Complex(v0 / n, 0.0), v1 / n};
    }
    return {plus, minus};
}

} // namespace gpd::qubit
