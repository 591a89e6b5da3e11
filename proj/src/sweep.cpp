#include "gpdephase/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>

namespace gpd::sweep {

namespace env = gpd::envmodels;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (nw == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::string fmt(double v) { return format_shortest(v); }

void stamp_common(SweepTable& tab, const EnvSpec& e) {
    tab.metadata["tool"] = "gpdephase 0.1.0";
    tab.metadata["env"] = (e.family == EnvFamily::Thermal) ? "thermal" : "noneq";
    tab.metadata["gamma0"] = fmt(e.gamma0);
    tab.metadata["cutoff"] = fmt(e.cutoff);
    if (e.family == EnvFamily::Thermal) {
        tab.metadata["temperature"] = fmt(e.temperature);
    } else {
        tab.metadata["lambda"] = fmt(e.lambda_param);
        tab.metadata["d"] = fmt(e.d_param);
        tab.metadata["mode"] = e.rebased ? "rebased" : "raw";
    }
}

void stamp_axis(SweepTable& tab, const std::string& key, const Axis& ax) {
    tab.metadata[key + "_name"] = ax.name;
    tab.metadata[key + "_start"] = fmt(ax.start);
    tab.metadata[key + "_stop"] = fmt(ax.stop);
    tab.metadata[key + "_count"] = std::to_string(ax.count);
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt(xs[i]);
    }
    return out;
}

} // namespace

double Axis::at(int i) const {
    if (count < 2) return start;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void Axis::validate() const {
    if (count < 2) throw DomainError("Axis '" + name + "': count must be >= 2");
    if (!(start < stop)) throw DomainError("Axis '" + name + "': start must be < stop");
}

std::size_t SweepTable::n_rows() const {
    if (!axes.empty()) return static_cast<std::size_t>(axes[0].count);
    const std::size_t nc = n_cols();
    return nc ? values.size() / nc : 0;
}

std::size_t SweepTable::n_cols() const {
    if (!columns.empty()) return columns.size();
    return axes.size() > 1 ? static_cast<std::size_t>(axes[1].count) : 1;
}

bool SweepTable::any_flagged() const {
    for (auto f : flagged)
        if (f) return true;
    return false;
}

std::string format_shortest(double v) {
    char buf[40];
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v && (best.empty() || std::strlen(buf) < best.size()))
            best = buf;
    }
    if (best.empty()) best = buf;
    return best;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* envcap = std::getenv("GPDEPHASE_THREADS")) {
        const int n = std::atoi(envcap);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

env::ThermalEnv EnvSpec::thermal_env(double s_override) const {
    return env::ThermalEnv(env::SpectralDensity(gamma0, s_override, cutoff), temperature);
}

env::NonEqEnv EnvSpec::noneq_env(double s_override) const {
    return env::NonEqEnv(env::SpectralDensity(gamma0, s_override, cutoff), lambda_param, d_param,
                         rebased);
}

SweepTable diffusion_map(const EnvSpec& fixed, const Axis& t_axis, const Axis& s_axis,
                         int workers) {
    t_axis.validate();
    s_axis.validate();
    SweepTable tab;
    tab.axes = {t_axis, s_axis};
    const std::size_t n = static_cast<std::size_t>(t_axis.count) * s_axis.count;
    tab.values.assign(n, kNaN);
    tab.flagged.assign(n, 0);
    parallel_for(n, resolve_workers(workers), [&](std::size_t idx) {
        const int it = static_cast<int>(idx) / s_axis.count;
        const int is = static_cast<int>(idx) % s_axis.count;
        try {
            const double t = t_axis.at(it);
            const double s = s_axis.at(is);
            tab.values[idx] = (fixed.family == EnvFamily::Thermal)
                                  ? env::thermal_D(fixed.thermal_env(s), t)
                                  : env::noneq_D(fixed.noneq_env(s), t);
        } catch (const std::exception&) {
            tab.flagged[idx] = 1;
        }
    });
    stamp_common(tab, fixed);
    stamp_axis(tab, "axis0", t_axis);
    stamp_axis(tab, "axis1", s_axis);
    tab.metadata["quantity"] = "diffusion D(t,s)";
    return tab;
}

SweepTable decoherence_curves(const EnvSpec& fixed, const Axis& t_axis,
                              const std::vector<double>& s_values, int workers) {
    t_axis.validate();
    if (s_values.empty()) throw DomainError("decoherence_curves: s_values must be non-empty");
    SweepTable tab;
    tab.axes = {t_axis};
    for (double s : s_values) tab.columns.push_back("F_s=" + fmt(s));
    const std::size_t ncol = s_values.size();
    const std::size_t n = static_cast<std::size_t>(t_axis.count) * ncol;
    tab.values.assign(n, kNaN);
    tab.flagged.assign(n, 0);
    parallel_for(n, resolve_workers(workers), [&](std::size_t idx) {
        const int it = static_cast<int>(idx / ncol);
        const std::size_t is = idx % ncol;
        try {
            const double t = t_axis.at(it);
            const double s = s_values[is];
            if (fixed.family == EnvFamily::Thermal) {
                const auto e = fixed.thermal_env(s);
                tab.values[idx] = (e.temperature == 0.0) ? env::thermal_F_closed(e, t)
                                                         : env::thermal_F_quadrature(e, t);
            } else {
                tab.values[idx] = env::noneq_F(fixed.noneq_env(s), t);
            }
        } catch (const std::exception&) {
            tab.flagged[idx] = 1;
        }
    });
    stamp_common(tab, fixed);
    stamp_axis(tab, "axis0", t_axis);
    tab.metadata["s_values"] = join(s_values);
    tab.metadata["quantity"] = "decoherence F(t)";
    return tab;
}

SweepTable gp_vs_s(const EnvSpec& fixed, const Axis& s_axis,
                   const std::vector<double>& gamma0_values, double theta, int grid,
                   int workers) {
    s_axis.validate();
    if (gamma0_values.empty()) throw DomainError("gp_vs_s: gamma0_values must be non-empty");
    SweepTable tab;
    tab.axes = {s_axis};
    for (double g : gamma0_values) tab.columns.push_back("dphi_over_phiu_g0=" + fmt(g));
    const std::size_t ncol = gamma0_values.size();
    const std::size_t n = static_cast<std::size_t>(s_axis.count) * ncol;
    tab.values.assign(n, kNaN);
    tab.flagged.assign(n, 0);
    parallel_for(n, resolve_workers(workers), [&](std::size_t idx) {
        const int is = static_cast<int>(idx / ncol);
        const std::size_t ig = idx % ncol;
        try {
            EnvSpec point = fixed;
            point.gamma0 = gamma0_values[ig];
            const double s = s_axis.at(is);
            gp::GpRun run{qubit::BlochInitial(theta),
                          (fixed.family == EnvFamily::Thermal)
                              ? gp::EnvVariant(point.thermal_env(s))
                              : gp::EnvVariant(point.noneq_env(s)),
                          2.0 * 3.14159265358979323846, grid};
            tab.values[idx] = gp::gp_evaluate(run).normalized_delta;
        } catch (const std::exception&) {
            tab.flagged[idx] = 1;
        }
    });
    stamp_common(tab, fixed);
    stamp_axis(tab, "axis0", s_axis);
    tab.metadata["gamma0_values"] = join(gamma0_values);
    tab.metadata["theta"] = fmt(theta);
    tab.metadata["grid"] = std::to_string(grid);
    tab.metadata["quantity"] = "normalized gp correction dphi/phi_u";
    return tab;
}

SweepTable gp_vs_theta(const EnvSpec& fixed, const Axis& theta_axis,
                       const std::vector<double>& s_values, int grid, int workers) {
    theta_axis.validate();
    if (s_values.empty()) throw DomainError("gp_vs_theta: s_values must be non-empty");
    SweepTable tab;
    tab.axes = {theta_axis};
    for (double s : s_values) tab.columns.push_back("dphi_s=" + fmt(s));
    const std::size_t ncol = s_values.size();
    const std::size_t n = static_cast<std::size_t>(theta_axis.count) * ncol;
    tab.values.assign(n, kNaN);
    tab.flagged.assign(n, 0);
    parallel_for(n, resolve_workers(workers), [&](std::size_t idx) {
        const int ith = static_cast<int>(idx / ncol);
        const std::size_t is = idx % ncol;
        try {
            const double theta = theta_axis.at(ith);
            const double s = s_values[is];
            gp::GpRun run{qubit::BlochInitial(theta),
                          (fixed.family == EnvFamily::Thermal)
                              ? gp::EnvVariant(fixed.thermal_env(s))
                              : gp::EnvVariant(fixed.noneq_env(s)),
                          2.0 * 3.14159265358979323846, grid};
            tab.values[idx] = gp::gp_evaluate(run).delta_phi;
        } catch (const std::exception&) {
            tab.flagged[idx] = 1;
        }
    });
    stamp_common(tab, fixed);
    stamp_axis(tab, "axis0", theta_axis);
    tab.metadata["s_values"] = join(s_values);
    tab.metadata["grid"] = std::to_string(grid);
    tab.metadata["quantity"] = "gp correction dphi(theta)";
    return tab;
}

} // namespace gpd::sweep
