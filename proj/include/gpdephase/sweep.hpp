// sweep.hpp — rectangular parameter-grid datasets: diffusion maps D(t, s),
// decoherence-factor curve families F(t; s), and geometric-phase sweeps over
// ohmicity, coupling and Bloch angle.
//
// Grid points are independent pure evaluations; they may be dispatched to a
// worker pool, and results are always assembled by grid index so tables are
// identical regardless of evaluation order or worker count. A failing point
// is recorded as a flagged NaN and the sweep continues.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpdephase/gp.hpp"

namespace gpd::sweep {

struct Axis {
    std::string name;
    double start = 0.0;
    double stop = 1.0;
    int count = 2;

    double at(int i) const;
    void validate() const;
};

// Rectangular dataset. Two shapes are used:
//  - grid: axes = {a0, a1}, one value per cell, row-major (a0 slow);
//  - curves: axes = {a0} plus named value columns (one per family member),
//    row-major over (a0, column).
// metadata carries the full parameter echo and the figure tag.
struct SweepTable {
    std::vector<Axis> axes;
    std::vector<std::string> columns;   // empty for plain grids
    std::vector<double> values;
    std::vector<std::uint8_t> flagged;  // 1 where the evaluation failed
    std::map<std::string, std::string> metadata;

    std::size_t n_rows() const;
    std::size_t n_cols() const;
    bool any_flagged() const;
};

// Worker-count resolution: explicit argument wins, else GPDEPHASE_THREADS,
// else hardware concurrency.
int resolve_workers(int requested = 0);

// Shortest decimal text that parses back to exactly v.
std::string format_shortest(double v);

enum class EnvFamily { Thermal, NonEq };

// Environment prototype for sweeps; `s` is overridden per grid point where an
// s-axis is swept.
struct EnvSpec {
    EnvFamily family = EnvFamily::Thermal;
    double gamma0 = 0.1;
    double s = 1.0;
    double cutoff = 10.0;
    double temperature = 0.0; // thermal only
    double lambda_param = 0.3; // noneq only
    double d_param = 2.0;      // noneq only
    bool rebased = true;       // noneq only

    envmodels::ThermalEnv thermal_env(double s_override) const;
    envmodels::NonEqEnv noneq_env(double s_override) const;
};

SweepTable diffusion_map(const EnvSpec& fixed, const Axis& t_axis, const Axis& s_axis,
                         int workers = 0);

SweepTable decoherence_curves(const EnvSpec& fixed, const Axis& t_axis,
                              const std::vector<double>& s_values, int workers = 0);

// normalized correction delta_phi / phi_u per (s, gamma0)
SweepTable gp_vs_s(const EnvSpec& fixed, const Axis& s_axis,
                   const std::vector<double>& gamma0_values, double theta, int grid = 4096,
                   int workers = 0);

// correction delta_phi per (theta, s)
SweepTable gp_vs_theta(const EnvSpec& fixed, const Axis& theta_axis,
                       const std::vector<double>& s_values, int grid = 4096, int workers = 0);

} // namespace gpd::sweep
