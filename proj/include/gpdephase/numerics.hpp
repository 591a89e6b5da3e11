// numerics.hpp — numerical kernel: Gamma function, adaptive quadrature on
// [0, inf) for exponentially damped (possibly oscillatory) integrands,
// finite-difference differentiation and sign-change bracketing.
//
// Everything here is a pure function of its inputs; all routines are safe to
// call concurrently.

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "gpdephase/errors.hpp"

namespace gpd::numerics {

struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Time windows on which a probed function is negative, endpoints refined by
// bisection. Intervals are disjoint and ordered; first_crossing is the left
// endpoint of the first negative window (absent when the sign never drops).
struct SignChangeReport {
    std::vector<std::pair<double, double>> intervals;
    std::optional<double> first_crossing;
};

// Gamma function, Lanczos rational approximation (g = 7, n = 9) with the
// reflection formula below x = 1/2. Non-positive integers are poles.
double gamma(double x);

// Lower incomplete gamma  integral_0^x u^{a-1} e^{-u} du,  a > 0, x >= 0,
// by the ascending series. Intended for small x (series panel use).
double gamma_lower(double a, double x);

// Adaptive Gauss-Kronrod 15(7) on a finite interval. panel_cap bounds the
// width of the initial uniform panels (use ~pi/(4 t) for cos(w t) factors).
QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec = {},
                                    double panel_cap = std::numeric_limits<double>::infinity());

// integral_lower^inf f(w) dw for f exponentially damped on the scale `scale`.
// The range is split at w = scale; the tail is mapped through
// w = scale/(1-u), u in [0,1). Integrable endpoint singularities no worse
// than w^p, p > -1, are handled by panel refinement toward the endpoint.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec = {},
                                         double scale = 1.0,
                                         double panel_cap = std::numeric_limits<double>::infinity(),
                                         double lower = 0.0);

// Central differences with one Richardson level; h = 1e-5 * scale.
double derivative(const std::function<double(double)>& f, double t, double scale = 1.0);

// Sample f on [t0, t1] at `samples` points and refine every bracketed sign
// change by bisection until |f| < 1e-10 or the bracket width falls below
// 1e-10 * (t1 - t0).
SignChangeReport find_sign_changes(const std::function<double(double)>& f,
                                   double t0, double t1, int samples);

} // namespace gpd::numerics
