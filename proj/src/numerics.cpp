#include "gpdephase/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace gpd::numerics {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos g = 7, n = 9 coefficient set.
constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoef[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double gamma_positive(double x) {
    // valid for x >= 0.5
    double a = kLanczosCoef[0];
    for (int k = 1; k < 9; ++k)
        a += kLanczosCoef[k] / (x - 1.0 + k);
    const double t = x + kLanczosG - 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, x - 0.5) * std::exp(-t) * a;
}

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
};

struct Panel {
    double a, b;       // in the panel's own coordinate
    bool tail;         // tail panels live in the u coordinate of w = scale/(1-u)
    double value, err;
};

struct PanelOrder {
    bool operator()(const Panel& p, const Panel& q) const { return p.err < q.err; }
};

// One GK15 evaluation of g on [a, b] with g either f itself or the mapped
// tail integrand.
void gk15(const std::function<double(double)>& f, double scale, Panel& p) {
    auto g = [&](double x) -> double {
        if (!p.tail) return f(x);
        const double om = 1.0 - x;
        const double w = scale / om;
        return f(w) * scale / (om * om);
    };
    const double c = 0.5 * (p.a + p.b);
    const double h = 0.5 * (p.b - p.a);
    const double fc = g(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = g(c - dx);
        const double f2 = g(c + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
    }
    p.value = resk * h;
    p.err = std::abs((resk - resg) * h);
}

QuadratureResult adapt(const std::function<double(double)>& f, double scale,
                       std::vector<Panel> panels, const QuadratureSpec& spec) {
    if (spec.relative_tolerance <= 0.0 || spec.absolute_tolerance <= 0.0)
        throw DomainError("quadrature tolerances must be positive");
    if (spec.max_subdivisions < 1)
        throw DomainError("max_subdivisions must be >= 1");

    double total = 0.0, toterr = 0.0;
    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
    for (auto& p : panels) {
        gk15(f, scale, p);
        total += p.value;
        toterr += p.err;
        heap.push(p);
    }
    auto converged = [&]() {
        return toterr <= std::max(spec.absolute_tolerance,
                                  spec.relative_tolerance * std::abs(total));
    };
    int splits = 0;
    while (!converged()) {
        if (splits >= spec.max_subdivisions || heap.empty())
            throw ConvergenceError("quadrature failed to converge", total, toterr);
        Panel worst = heap.top();
        heap.pop();
        total -= worst.value;
        toterr -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw ConvergenceError("quadrature panel underflow", total + worst.value,
                                   toterr + worst.err);
        Panel left{worst.a, mid, worst.tail, 0, 0};
        Panel right{mid, worst.b, worst.tail, 0, 0};
        gk15(f, scale, left);
        gk15(f, scale, right);
        total += left.value + right.value;
        toterr += left.err + right.err;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    return {total, toterr};
}

std::vector<Panel> uniform_panels(double a, double b, double cap, bool tail) {
    std::vector<Panel> out;
    const double len = b - a;
    std::size_t n = 1;
    if (std::isfinite(cap) && cap > 0.0 && len > cap)
        n = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(len / cap)), 2000000);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = a + len * static_cast<double>(i) / static_cast<double>(n);
        const double x1 = (i + 1 == n) ? b : a + len * static_cast<double>(i + 1) / static_cast<double>(n);
        out.push_back({x0, x1, tail, 0, 0});
    }
    return out;
}

} // namespace

double gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        std::ostringstream os;
        os << "gamma pole at x = " << x;
        throw DomainError(os.str());
    }
    if (x >= 0.5) return gamma_positive(x);
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (std::sin(kPi * x) * gamma_positive(1.0 - x));
}

double gamma_lower(double a, double x) {
    if (a <= 0.0) throw DomainError("gamma_lower requires a > 0");
    if (x < 0.0) throw DomainError("gamma_lower requires x >= 0");
    if (x == 0.0) return 0.0;
    // ascending series: x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(x, a) * std::exp(-x) * sum;
}

QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureSpec& spec,
                                    double panel_cap) {
    if (!(a < b)) throw DomainError("integrate_interval requires a < b");
    return adapt(f, 1.0, uniform_panels(a, b, panel_cap, false), spec);
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec, double scale,
                                         double panel_cap, double lower) {
    if (scale <= 0.0) throw DomainError("integrate_semi_infinite requires scale > 0");
    if (lower < 0.0) throw DomainError("integrate_semi_infinite requires lower >= 0");

    std::vector<Panel> panels;
    double tail_from = lower;
    if (lower < scale) {
        panels = uniform_panels(lower, scale, panel_cap, false);
        tail_from = scale;
    }

    // Tail in u with w = scale/(1-u). Pre-panel so oscillations are resolved
    // while the damping e^{-w/scale} still matters; the cap is relaxed
    // geometrically as the amplitude dies off.
    const double u_max = 1.0 - 1e-6; // w = 1e6 * scale
    double u0 = 1.0 - scale / std::max(tail_from, scale);
    if (std::isfinite(panel_cap) && panel_cap > 0.0) {
        double w = scale / (1.0 - u0);
        int guard = 0;
        while (u0 < u_max && guard++ < 2000000) {
            const double local_cap = panel_cap * std::max(1.0, std::exp((w - scale) / (4.0 * scale)));
            double w_next = w + local_cap;
            double u1 = 1.0 - scale / w_next;
            if (u1 > u_max || w_next > 64.0 * scale) {
                break;
            }
            panels.push_back({u0, u1, true, 0, 0});
            u0 = u1;
            w = w_next;
        }
    }
    // remaining far tail: geometric split keeps single panels well-behaved
    while (u0 < u_max) {
        double u1 = std::min(u_max, 0.5 * (u0 + 1.0));
        if (u1 - u0 < 1e-12) u1 = u_max;
        panels.push_back({u0, u1, true, 0, 0});
        u0 = u1;
    }
    return adapt(f, scale, std::move(panels), spec);
}

double derivative(const std::function<double(double)>& f, double t, double scale) {
    const double h = 1e-5 * (scale > 0.0 ? scale : 1.0);
    auto central = [&](double step) { return (f(t + step) - f(t - step)) / (2.0 * step); };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

SignChangeReport find_sign_changes(const std::function<double(double)>& f,
                                   double t0, double t1, int samples) {
    if (!(t0 < t1)) throw DomainError("find_sign_changes requires t0 < t1");
    if (samples < 16) throw DomainError("find_sign_changes requires samples >= 16");

    const double width_tol = 1e-10 * (t1 - t0);
    auto refine = [&](double lo, double hi) {
        // f(lo) and f(hi) have opposite signs
        double flo = f(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (std::abs(fm) < 1e-10 || (hi - lo) < width_tol) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> ts(static_cast<std::size_t>(samples));
    std::vector<bool> neg(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
        neg[i] = f(ts[i]) < 0.0;
    }

    SignChangeReport rep;
    bool in_neg = neg[0];
    double start = t0;
    for (int i = 1; i < samples; ++i) {
        if (neg[i] == neg[i - 1]) continue;
        const double root = refine(ts[i - 1], ts[i]);
        if (in_neg) {
            rep.intervals.emplace_back(start, root);
        } else {
            start = root;
        }
        in_neg = neg[i];
    }
    if (in_neg) rep.intervals.emplace_back(start, t1);
    if (!rep.intervals.empty()) rep.first_crossing = rep.intervals.front().first;
    return rep;
}

} // namespace gpd::numerics
