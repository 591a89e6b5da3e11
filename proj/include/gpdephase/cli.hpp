// cli.hpp — command-line surface: config parsing, command dispatch, CSV/JSON
// table output with checksummed manifests, and gnuplot script emission.
//
// Commands: decoherence, diffusion-map, markovianity, gp, gp-sweep, figure.
// Flags override config-file values; GPDEPHASE_THREADS caps the worker pool.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpdephase/sweep.hpp"

namespace gpd::cli {

struct RunConfig {
    std::string command;            // one of the six commands
    std::string figure;             // fig1..fig7 (figure command only)
    std::string config_path;        // optional --config file

    // environment record
    std::string env_kind = "thermal";
    double gamma0 = 0.1;
    double s = 1.0;
    double cutoff = 10.0;
    double temperature = 0.0;
    double lambda_param = 0.3;
    double d_param = 2.0;
    bool raw_mode = false;

    // state record
    double theta = 1.0471975511965976; // pi/3
    double theta_min = 0.0;
    double theta_max = 3.14159265358979323846;
    int theta_count = 25;

    // sweep record
    double s_min = 0.025;
    double s_max = 5.0;
    int s_count = 50;
    std::vector<double> s_values;
    std::vector<double> gamma0_values;
    std::string sweep_axis = "s";   // gp-sweep: "s" | "theta"

    // numeric record
    int grid = 4096;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int samples = 2048;

    // time record
    double t_min = 0.0;
    double t_max = 3.0;
    int t_count = 200;

    // output record
    std::string out_path;           // default: <command>.csv
    std::string format = "csv";     // csv | json
    bool emit_plot = false;
};

struct ManifestEntry {
    std::string path;
    std::string checksum; // fnv1a-64, hex
    std::uint64_t bytes = 0;
};

struct OutputManifest {
    std::vector<ManifestEntry> entries;
    std::map<std::string, std::string> parameter_echo;
    double wall_ms = 0.0;
    bool ok = false;

    std::string to_json() const;
};

// Parse flags (and an optional --config file; flags win). Throws
// ValidationError naming the offending key on bad input.
RunConfig load_config(const std::vector<std::string>& args);

// Execute a validated config: compute, write outputs, verify checksums.
OutputManifest run_command(const RunConfig& cfg);

// Serialize one table. CSV: '#'-prefixed metadata echo, then a header of
// axis/column names and rows with 17 significant digits, LF endings, flagged
// points as "nan". JSON: axes + columns + row-major values (null where
// flagged) + metadata.
ManifestEntry write_table(const sweep::SweepTable& table, const std::string& format,
                          const std::string& path);

// Read back a table written by write_table (both formats).
sweep::SweepTable read_table(const std::string& path);

// Emit a gnuplot script rendering a CSV table; style "density" or "curves".
// The script is written next to the data and never executed.
ManifestEntry emit_plot_script(const std::string& table_path, const std::string& style,
                               const std::string& script_path);

std::string fnv1a64_file(const std::string& path);

// Entry point used by the binary: returns the process exit status.
int main_entry(int argc, char** argv);

} // namespace gpd::cli
