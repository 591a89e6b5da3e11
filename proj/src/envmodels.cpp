#include "gpdephase/envmodels.hpp"

#include <cmath>
#include <sstream>

namespace gpd::envmodels {

namespace num = gpd::numerics;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleWindow = 1e-3;   // fallback window around s in {0, 1}
constexpr double kSeriesEdge = 1e-3;   // series panel covers [0, kSeriesEdge * cutoff]

double coth(double x) {
    // x > 0; stable at both ends: coth = 1 + 2/(e^{2x} - 1)
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

// integral_0^a w^{s-2} e^{-w/L} (1 - cos(w t)) dw by the small-w expansion
// (1 - cos(w t))/w^2 = sum_k (-1)^{k+1} t^{2k} w^{2k-2} / (2k)!
double head_series_zero_T(double s, double L, double t, double a) {
    const double x = a / L;
    double tk = 1.0; // t^{2k} / (2k)!
    double sum = 0.0;
    for (int k = 1; k <= 80; ++k) {
        tk *= t * t / ((2.0 * k - 1.0) * (2.0 * k));
        const double p = s - 1.0 + 2.0 * k; // exponent + 1 of the monomial
        const double term = ((k % 2) ? 1.0 : -1.0) * tk * std::pow(L, p) * num::gamma_lower(p, x);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// exponent of the non-equilibrium attenuation: F_raw(t) = exp(-g(t)) with
//   g = gamma0 [ (e^{-2dt} - e^{-4dt}) Gamma(1+s) h(t) + (1 - e^{-2dt}) ],
//   h = (1 + u^2)^{-(1+s)/2} cos((1+s) atan u),  u = 2 L (t - lambda).
double noneq_exponent(const NonEqEnv& env, double t) {
    const double g0 = env.spectral.gamma0;
    const double s = env.spectral.s;
    const double L = env.spectral.cutoff;
    const double u = 2.0 * L * (t - env.lambda_param);
    const double ang = std::atan(u);
    const double h = std::pow(1.0 + u * u, -(1.0 + s) / 2.0) * std::cos((1.0 + s) * ang);
    const double w = std::exp(-2.0 * env.d_param * t) - std::exp(-4.0 * env.d_param * t);
    const double rise = -std::expm1(-2.0 * env.d_param * t);
    return g0 * (w * num::gamma(1.0 + s) * h + rise);
}

double noneq_exponent_derivative(const NonEqEnv& env, double t) {
    const double g0 = env.spectral.gamma0;
    const double s = env.spectral.s;
    const double L = env.spectral.cutoff;
    const double d = env.d_param;
    const double u = 2.0 * L * (t - env.lambda_param);
    const double ang = std::atan(u);
    const double r2 = 1.0 + u * u;
    const double h = std::pow(r2, -(1.0 + s) / 2.0) * std::cos((1.0 + s) * ang);
    const double hp = -2.0 * L * (1.0 + s) * std::pow(r2, -(2.0 + s) / 2.0) * std::sin((2.0 + s) * ang);
    const double e2 = std::exp(-2.0 * d * t);
    const double e4 = std::exp(-4.0 * d * t);
    const double w = e2 - e4;
    const double wp = -2.0 * d * e2 + 4.0 * d * e4;
    const double G = num::gamma(1.0 + s);
    return g0 * (wp * G * h + w * G * hp + 2.0 * d * e2);
}

void require_nonnegative_time(double t, const char* op) {
    if (t < 0.0) {
        std::ostringstream os;
        os << op << ": time must be >= 0, got " << t;
        throw DomainError(os.str());
    }
}

} // namespace

SpectralDensity::SpectralDensity(double gamma0_, double s_, double cutoff_)
    : gamma0(gamma0_), s(s_), cutoff(cutoff_) {
    if (gamma0 < 0.0) throw DomainError("SpectralDensity: gamma0 must be >= 0");
    if (!(s > -1.0)) throw DomainError("SpectralDensity: s must be > -1");
    if (!(cutoff > 0.0)) throw DomainError("SpectralDensity: cutoff must be > 0");
}

ThermalEnv::ThermalEnv(SpectralDensity sd, double temperature_)
    : spectral(sd), temperature(temperature_) {
    if (temperature < 0.0) throw DomainError("ThermalEnv: temperature must be >= 0");
}

NonEqEnv::NonEqEnv(SpectralDensity sd, double lambda_, double d_, bool rebased_)
    : spectral(sd), lambda_param(lambda_), d_param(d_), rebased(rebased_) {
    if (!(d_param > 0.0)) throw DomainError("NonEqEnv: d must be > 0");
}

double spectral_density_eval(const SpectralDensity& sd, double omega) {
    if (omega < 0.0) throw DomainError("spectral_density_eval: omega must be >= 0");
    if (omega == 0.0) {
        if (sd.s > 0.0) return 0.0;
        if (sd.s == 0.0) return sd.gamma0 * sd.cutoff;
        throw DomainError("spectral_density_eval: omega = 0 diverges for s < 0");
    }
    return sd.gamma0 * std::pow(omega, sd.s) * std::pow(sd.cutoff, 1.0 - sd.s) *
           std::exp(-omega / sd.cutoff);
}

double thermal_F_closed(const ThermalEnv& env, double t) {
    require_nonnegative_time(t, "thermal_F_closed");
    if (env.temperature != 0.0)
        throw DomainError("thermal_F_closed: closed form is zero-temperature only");
    const double s = env.spectral.s;
    if (std::abs(s) < kPoleWindow || std::abs(s - 1.0) < kPoleWindow)
        return thermal_F_quadrature(env, t);
    if (t == 0.0) return 0.0;
    const double g0 = env.spectral.gamma0;
    const double L = env.spectral.cutoff;
    const double Lt = L * t;
    const double phi = std::atan(Lt);
    const double bracket =
        1.0 - std::pow(1.0 + Lt * Lt, -s / 2.0) * (std::cos(s * phi) + Lt * std::sin(s * phi));
    return 4.0 * g0 * num::gamma(s) / (s - 1.0) * bracket;
}

double thermal_F_quadrature(const ThermalEnv& env, double t) {
    require_nonnegative_time(t, "thermal_F_quadrature");
    if (t == 0.0) return 0.0;
    const double g0 = env.spectral.gamma0;
    const double s = env.spectral.s;
    const double L = env.spectral.cutoff;
    const double T = env.temperature;
    const double pref = 4.0 * g0 * std::pow(L, 1.0 - s);
    const double cap = kPi / (4.0 * t);
    num::QuadratureSpec spec;

    if (T == 0.0) {
        const double a = kSeriesEdge * L;
        const double head = head_series_zero_T(s, L, t, a);
        auto f = [s, L, t](double w) {
            return std::pow(w, s - 2.0) * std::exp(-w / L) * (1.0 - std::cos(w * t));
        };
        auto tail = num::integrate_semi_infinite(f, spec, L, cap, a);
        return pref * (head + tail.value);
    }

    if (!(s > 0.0))
        throw DomainError("thermal_F_quadrature: finite temperature requires s > 0");
    auto f = [s, L, t, T](double w) {
        return std::pow(w, s - 2.0) * std::exp(-w / L) * coth(w / (2.0 * T)) *
               (1.0 - std::cos(w * t));
    };
    // head through w = L x^2 to regularize the w^{s-1}-type endpoint
    auto head_sub = [&](double x) { return f(L * x * x) * 2.0 * L * x; };
    auto head = num::integrate_interval(head_sub, 0.0, 1.0, spec, cap / (2.0 * L));
    auto tail = num::integrate_semi_infinite(f, spec, L, cap, L);
    return pref * (head.value + tail.value);
}

double thermal_D(const ThermalEnv& env, double t) {
    require_nonnegative_time(t, "thermal_D");
    if (env.temperature != 0.0)
        throw DomainError("thermal_D: analytic derivative is zero-temperature only");
    const double g0 = env.spectral.gamma0;
    const double s = env.spectral.s;
    const double L = env.spectral.cutoff;
    const double Lt = L * t;
    const double phi = std::atan(Lt);
    // Gamma(s) sin(s phi) written as Gamma(s+1) sin(s phi)/s stays finite
    // through s = 0
    const double sinc = (std::abs(s) < 1e-8) ? phi : std::sin(s * phi) / s;
    return 2.0 * g0 * L * num::gamma(s + 1.0) * std::pow(1.0 + Lt * Lt, -s / 2.0) * sinc;
}

double noneq_F(const NonEqEnv& env, double t) {
    require_nonnegative_time(t, "noneq_F");
    const double g = noneq_exponent(env, t);
    if (!env.rebased) return std::exp(-g);
    return std::expm1(-g); // exp(-g(t)) - exp(-g(0)), with g(0) = 0 identically
}

double noneq_D(const NonEqEnv& env, double t) {
    require_nonnegative_time(t, "noneq_D");
    return -0.5 * noneq_exponent_derivative(env, t) * std::exp(-noneq_exponent(env, t));
}

MarkovReport markovianity_report(const ThermalEnv& env, double t_max, int samples) {
    if (!(t_max > 0.0)) throw DomainError("markovianity_report: t_max must be > 0");
    auto rep = num::find_sign_changes([&](double t) { return thermal_D(env, t); }, 0.0, t_max,
                                      samples);
    return {"thermal", rep, rep.intervals.empty()};
}

MarkovReport markovianity_report(const NonEqEnv& env, double t_max, int samples) {
    if (!(t_max > 0.0)) throw DomainError("markovianity_report: t_max must be > 0");
    auto rep = num::find_sign_changes([&](double t) { return noneq_D(env, t); }, 0.0, t_max,
                                      samples);
    return {"noneq", rep, rep.intervals.empty()};
}

} // namespace gpd::envmodels
