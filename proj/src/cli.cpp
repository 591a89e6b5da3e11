#include "gpdephase/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace gpd::cli {

namespace sw = gpd::sweep;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kToolVersion = "gpdephase 0.1.0";

// thrown after --help text has been printed
struct HelpShown {};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("config key '" + key + "': bad number '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError("config key '" + key + "': empty list");
    return out;
}

double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': bad number '" + text + "'");
    }
}

int parse_int(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': bad integer '" + text + "'");
    }
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ValidationError("config key '" + key + "': bad boolean '" + text + "'");
}

void apply_config_entry(RunConfig& cfg, const std::string& section, const std::string& key,
                        const std::string& value) {
    const std::string where = section.empty() ? key : (section + "." + key);
    if (key == "command") cfg.command = value;
    else if (key == "figure") cfg.figure = value;
    else if (key == "kind" || key == "env") cfg.env_kind = value;
    else if (key == "gamma0") cfg.gamma0 = parse_double(value, where);
    else if (key == "s") cfg.s = parse_double(value, where);
    else if (key == "cutoff") cfg.cutoff = parse_double(value, where);
    else if (key == "temperature") cfg.temperature = parse_double(value, where);
    else if (key == "lambda") cfg.lambda_param = parse_double(value, where);
    else if (key == "d") cfg.d_param = parse_double(value, where);
    else if (key == "mode") cfg.raw_mode = (value == "raw") ? true
                             : (value == "rebased") ? false
                             : throw ValidationError("config key '" + where + "': expected raw|rebased");
    else if (key == "theta") cfg.theta = parse_double(value, where);
    else if (key == "theta_min") cfg.theta_min = parse_double(value, where);
    else if (key == "theta_max") cfg.theta_max = parse_double(value, where);
    else if (key == "theta_count") cfg.theta_count = parse_int(value, where);
    else if (key == "s_min") cfg.s_min = parse_double(value, where);
    else if (key == "s_max") cfg.s_max = parse_double(value, where);
    else if (key == "s_count") cfg.s_count = parse_int(value, where);
    else if (key == "s_values") cfg.s_values = parse_list(value, where);
    else if (key == "gamma0_values") cfg.gamma0_values = parse_list(value, where);
    else if (key == "axis" || key == "sweep") cfg.sweep_axis = value;
    else if (key == "grid") cfg.grid = parse_int(value, where);
    else if (key == "rel_tol") cfg.rel_tol = parse_double(value, where);
    else if (key == "abs_tol") cfg.abs_tol = parse_double(value, where);
    else if (key == "samples") cfg.samples = parse_int(value, where);
    else if (key == "t_min") cfg.t_min = parse_double(value, where);
    else if (key == "t_max") cfg.t_max = parse_double(value, where);
    else if (key == "t_count") cfg.t_count = parse_int(value, where);
    else if (key == "path" || key == "out") cfg.out_path = value;
    else if (key == "format") cfg.format = value;
    else if (key == "plot_script") cfg.emit_plot = parse_bool(value, where);
    else throw ValidationError("unknown config key '" + where + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file not readable: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_config_entry(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    static const std::vector<std::string> commands = {"decoherence", "diffusion-map",
                                                      "markovianity", "gp", "gp-sweep", "figure"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        fail("command: expected one of decoherence|diffusion-map|markovianity|gp|gp-sweep|figure");
    if (cfg.env_kind != "thermal" && cfg.env_kind != "noneq")
        fail("env: expected thermal|noneq");
    if (cfg.format != "csv" && cfg.format != "json") fail("format: expected csv|json");
    if (cfg.gamma0 < 0.0) fail("gamma0: must be >= 0");
    if (!(cfg.s > -1.0)) fail("s: must be > -1");
    if (!(cfg.s_min > -1.0)) fail("s_min: must be > -1");
    if (!(cfg.cutoff > 0.0)) fail("cutoff: must be > 0");
    if (cfg.temperature < 0.0) fail("temperature: must be >= 0");
    if (cfg.env_kind == "noneq" && !(cfg.d_param > 0.0)) fail("d: must be > 0");
    if (!(cfg.theta >= 0.0 && cfg.theta <= kPi)) fail("theta: must lie in [0, pi]");
    if (cfg.grid < 64) fail("grid: must be >= 64");
    if (cfg.samples < 16) fail("samples: must be >= 16");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) fail("tolerances must be > 0");
    if (!(cfg.t_max > cfg.t_min)) fail("t_max: must exceed t_min");
    if (cfg.t_count < 2) fail("t_count: must be >= 2");
    for (double sv : cfg.s_values)
        if (!(sv > -1.0)) fail("s_values: every entry must be > -1");
    for (double gv : cfg.gamma0_values)
        if (gv < 0.0) fail("gamma0_values: entries must be >= 0");
    if (cfg.command == "gp-sweep" && cfg.sweep_axis != "s" && cfg.sweep_axis != "theta")
        fail("sweep: expected s|theta");
    if (cfg.command == "figure") {
        static const std::vector<std::string> figs = {"fig1", "fig2", "fig3", "fig4",
                                                      "fig5", "fig6", "fig7"};
        if (std::find(figs.begin(), figs.end(), cfg.figure) == figs.end())
            fail("figure: expected fig1..fig7");
    }
    if (cfg.emit_plot && cfg.format != "csv")
        fail("plot_script: requires format=csv");
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--config", cfg.config_path, "configuration file (parsed before flags)");
    sub->add_option("--env", cfg.env_kind, "environment kind: thermal|noneq");
    sub->add_option("--gamma0", cfg.gamma0, "coupling constant");
    sub->add_option("--s", cfg.s, "ohmicity parameter");
    sub->add_option("--cutoff", cfg.cutoff, "reservoir cutoff in units of Omega");
    sub->add_option("--temperature", cfg.temperature, "bath temperature (thermal)");
    sub->add_option("--lambda", cfg.lambda_param, "non-equilibrium lambda parameter");
    sub->add_option("--d", cfg.d_param, "non-equilibrium d parameter");
    sub->add_flag("--raw", cfg.raw_mode, "use the raw (non-rebased) noneq factor");
    sub->add_option("--theta", cfg.theta, "Bloch polar angle");
    sub->add_option("--theta-min", cfg.theta_min);
    sub->add_option("--theta-max", cfg.theta_max);
    sub->add_option("--theta-count", cfg.theta_count);
    sub->add_option("--s-min", cfg.s_min);
    sub->add_option("--s-max", cfg.s_max);
    sub->add_option("--s-count", cfg.s_count);
    sub->add_option("--s-values", cfg.s_values)->delimiter(',');
    sub->add_option("--gamma0-values", cfg.gamma0_values)->delimiter(',');
    sub->add_option("--sweep", cfg.sweep_axis, "gp-sweep axis: s|theta");
    sub->add_option("--grid", cfg.grid, "time nodes per quasi-cycle");
    sub->add_option("--rel-tol", cfg.rel_tol);
    sub->add_option("--abs-tol", cfg.abs_tol);
    sub->add_option("--samples", cfg.samples, "sign-scan sample count");
    sub->add_option("--t-min", cfg.t_min);
    sub->add_option("--t-max", cfg.t_max);
    sub->add_option("--t-count", cfg.t_count);
    sub->add_option("--out", cfg.out_path, "output path");
    sub->add_option("--format", cfg.format, "csv|json");
    sub->add_flag("--plot-script", cfg.emit_plot, "also emit a gnuplot script");
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string csv_payload(const sw::SweepTable& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.metadata) os << "# " << k << "=" << v << "\n";
    const std::size_t ncols = t.n_cols();
    // header
    if (t.axes.size() == 2) {
        os << t.axes[0].name << "," << t.axes[1].name << ",value\n";
        for (int i0 = 0; i0 < t.axes[0].count; ++i0) {
            for (int i1 = 0; i1 < t.axes[1].count; ++i1) {
                const std::size_t idx = static_cast<std::size_t>(i0) * t.axes[1].count + i1;
                os << fmt17(t.axes[0].at(i0)) << "," << fmt17(t.axes[1].at(i1)) << ","
                   << fmt17(t.values[idx]) << "\n";
            }
        }
        return os.str();
    }
    bool first = true;
    if (!t.axes.empty()) {
        os << t.axes[0].name;
        first = false;
    }
    for (const auto& c : t.columns) {
        if (!first) os << ",";
        os << c;
        first = false;
    }
    os << "\n";
    const std::size_t rows = t.n_rows();
    for (std::size_t r = 0; r < rows; ++r) {
        bool lead = true;
        if (!t.axes.empty()) {
            os << fmt17(t.axes[0].at(static_cast<int>(r)));
            lead = false;
        }
        for (std::size_t c = 0; c < ncols; ++c) {
            if (!lead) os << ",";
            os << fmt17(t.values[r * ncols + c]);
            lead = false;
        }
        os << "\n";
    }
    return os.str();
}

std::string json_payload(const sw::SweepTable& t) {
    nlohmann::json j;
    j["axes"] = nlohmann::json::array();
    for (const auto& ax : t.axes) {
        j["axes"].push_back({{"name", ax.name},
                             {"start", ax.start},
                             {"stop", ax.stop},
                             {"count", ax.count}});
    }
    j["columns"] = t.columns;
    j["metadata"] = t.metadata;
    nlohmann::json vals = nlohmann::json::array();
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        const bool bad = (i < t.flagged.size() && t.flagged[i]) || !std::isfinite(t.values[i]);
        if (bad)
            vals.push_back(nullptr);
        else
            vals.push_back(t.values[i]);
    }
    j["values"] = std::move(vals);
    return j.dump(1) + "\n";
}

ManifestEntry make_entry(const std::string& path) {
    const std::string bytes = read_file(path);
    return {path, hex64(fnv1a64(bytes)), bytes.size()};
}

std::string plot_base(const std::string& table_path) {
    const auto dot = table_path.find_last_of('.');
    return dot == std::string::npos ? table_path : table_path.substr(0, dot);
}

struct FigureSet {
    sw::SweepTable table;
    std::string suffix; // appended to the output stem ("" for single-table figures)
    std::string style;  // density | curves
};

std::vector<FigureSet> build_figure(const RunConfig& cfg) {
    sw::EnvSpec th;
    th.family = sw::EnvFamily::Thermal;
    th.gamma0 = 0.1;
    th.cutoff = 10.0;
    sw::EnvSpec nq;
    nq.family = sw::EnvFamily::NonEq;
    nq.gamma0 = 0.1;
    nq.cutoff = 10.0;
    nq.lambda_param = 0.3;
    nq.d_param = 2.0;

    const sw::Axis tmap{"t", 0.015, 3.0, 200};
    const sw::Axis smap{"s", 0.025, 5.0, 200};
    const sw::Axis tcurve{"t", 0.0, 3.0, 400};

    std::vector<FigureSet> out;
    if (cfg.figure == "fig1") {
        out.push_back({sw::diffusion_map(th, tmap, smap), "", "density"});
    } else if (cfg.figure == "fig2") {
        out.push_back({sw::decoherence_curves(th, tcurve, {1.0, 4.0}), "", "curves"});
    } else if (cfg.figure == "fig3") {
        out.push_back({sw::diffusion_map(nq, tmap, smap), "", "density"});
    } else if (cfg.figure == "fig4") {
        out.push_back({sw::decoherence_curves(nq, tcurve, {1.0, 2.0, 3.0}), "", "curves"});
    } else if (cfg.figure == "fig5") {
        // the strongly sub-ohmic corner needs a finer phase grid to clear the
        // doubling check
        out.push_back({sw::gp_vs_s(th, {"s", -0.95, 4.0, 40}, {0.001, 0.005, 0.01, 0.03},
                                   kPi / 3.0, std::max(cfg.grid, 8192)),
                       "", "curves"});
    } else if (cfg.figure == "fig6") {
        sw::EnvSpec weak = th;
        weak.gamma0 = 0.01;
        out.push_back({sw::gp_vs_theta(weak, {"theta", 0.0, kPi, 25}, {1.0, 2.0, 2.5, 3.0},
                                       cfg.grid),
                       "", "curves"});
    } else if (cfg.figure == "fig7") {
        struct Set { double g0, L, lam, d; };
        const std::vector<Set> sets = {{0.5, 10.0, 0.5, 1.0}, {0.5, 5.0, 0.5, 1.0},
                                       {0.1, 5.0, 0.5, 1.0},  {0.1, 1.0, 0.5, 1.0},
                                       {0.1, 1.0, 1.0, 0.5},  {0.01, 10.0, 0.5, 1.0}};
        int n = 0;
        for (const auto& set : sets) {
            sw::EnvSpec e = nq;
            e.gamma0 = set.g0;
            e.cutoff = set.L;
            e.lambda_param = set.lam;
            e.d_param = set.d;
            // the gamma0 = 0.5 sets develop a steep transient at t ~ lambda
            auto tab = sw::gp_vs_s(e, {"s", -0.9, 4.0, 25}, {set.g0}, kPi / 3.0,
                                   std::max(cfg.grid, 32768));
            tab.metadata["set"] = std::to_string(++n);
            out.push_back({std::move(tab), "_set" + std::to_string(n), "curves"});
        }
    }
    for (auto& fs : out) fs.table.metadata["figure"] = cfg.figure;
    return out;
}

sw::EnvSpec env_from_cfg(const RunConfig& cfg) {
    sw::EnvSpec e;
    e.family = (cfg.env_kind == "thermal") ? sw::EnvFamily::Thermal : sw::EnvFamily::NonEq;
    e.gamma0 = cfg.gamma0;
    e.s = cfg.s;
    e.cutoff = cfg.cutoff;
    e.temperature = cfg.temperature;
    e.lambda_param = cfg.lambda_param;
    e.d_param = cfg.d_param;
    e.rebased = !cfg.raw_mode;
    return e;
}

std::map<std::string, std::string> echo_parameters(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    m["command"] = cfg.command;
    if (!cfg.figure.empty()) m["figure"] = cfg.figure;
    m["env"] = cfg.env_kind;
    m["gamma0"] = sw::format_shortest(cfg.gamma0);
    m["s"] = sw::format_shortest(cfg.s);
    m["cutoff"] = sw::format_shortest(cfg.cutoff);
    m["temperature"] = sw::format_shortest(cfg.temperature);
    m["lambda"] = sw::format_shortest(cfg.lambda_param);
    m["d"] = sw::format_shortest(cfg.d_param);
    m["mode"] = cfg.raw_mode ? "raw" : "rebased";
    m["theta"] = sw::format_shortest(cfg.theta);
    m["grid"] = std::to_string(cfg.grid);
    m["samples"] = std::to_string(cfg.samples);
    m["t_max"] = sw::format_shortest(cfg.t_max);
    m["format"] = cfg.format;
    m["tool"] = kToolVersion;
    return m;
}

} // namespace

std::string OutputManifest::to_json() const {
    nlohmann::json j;
    j["ok"] = ok;
    j["wall_ms"] = wall_ms;
    j["parameters"] = parameter_echo;
    j["files"] = nlohmann::json::array();
    for (const auto& e : entries)
        j["files"].push_back({{"path", e.path}, {"checksum", e.checksum}, {"bytes", e.bytes}});
    return j.dump(1) + "\n";
}

RunConfig load_config(const std::vector<std::string>& args) {
    RunConfig cfg;

    // config file first; flags override its values
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config: missing path");
            load_config_file(cfg, args[i + 1]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            load_config_file(cfg, args[i].substr(9));
        }
    }

    CLI::App app{"dephasing-qubit decoherence, diffusion and geometric-phase toolkit"};
    app.require_subcommand(0, 1);
    add_common_options(&app, cfg);
    for (const char* name : {"decoherence", "diffusion-map", "markovianity", "gp", "gp-sweep"}) {
        auto* sub = app.add_subcommand(name);
        add_common_options(sub, cfg);
        sub->callback([&cfg, name]() { cfg.command = name; });
    }
    auto* fig = app.add_subcommand("figure", "regenerate a bundled dataset preset");
    add_common_options(fig, cfg);
    fig->add_option("name", cfg.figure, "fig1..fig7")->required();
    fig->callback([&cfg]() { cfg.command = "figure"; });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        (void)app.exit(e);
        throw HelpShown{};
    } catch (const CLI::ParseError& e) {
        throw ValidationError(std::string("argument error: ") + e.what());
    }

    if (cfg.out_path.empty())
        cfg.out_path = (cfg.command == "figure" ? cfg.figure : cfg.command) +
                       (cfg.format == "json" ? ".json" : ".csv");
    validate(cfg);
    return cfg;
}

ManifestEntry write_table(const sw::SweepTable& table, const std::string& format,
                          const std::string& path) {
    // axis geometry rides along in the metadata so CSV files are
    // self-describing on read-back
    sw::SweepTable t = table;
    for (std::size_t k = 0; k < t.axes.size(); ++k) {
        const std::string key = "axis" + std::to_string(k);
        if (t.metadata.count(key + "_name")) continue;
        t.metadata[key + "_name"] = t.axes[k].name;
        t.metadata[key + "_start"] = sw::format_shortest(t.axes[k].start);
        t.metadata[key + "_stop"] = sw::format_shortest(t.axes[k].stop);
        t.metadata[key + "_count"] = std::to_string(t.axes[k].count);
    }
    if (format == "csv")
        write_file(path, csv_payload(t));
    else if (format == "json")
        write_file(path, json_payload(t));
    else
        throw ValidationError("format: expected csv|json");
    return make_entry(path);
}

sw::SweepTable read_table(const std::string& path) {
    sw::SweepTable t;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        const auto j = nlohmann::json::parse(read_file(path));
        for (const auto& a : j.at("axes"))
            t.axes.push_back({a.at("name").get<std::string>(), a.at("start").get<double>(),
                              a.at("stop").get<double>(), a.at("count").get<int>()});
        t.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& [k, v] : j.at("metadata").items())
            t.metadata[k] = v.get<std::string>();
        for (const auto& v : j.at("values")) {
            if (v.is_null()) {
                t.values.push_back(std::numeric_limits<double>::quiet_NaN());
                t.flagged.push_back(1);
            } else {
                t.values.push_back(v.get<double>());
                t.flagged.push_back(0);
            }
        }
        return t;
    }

    std::istringstream in(read_file(path));
    std::string line;
    bool header_done = false;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos)
                t.metadata[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) fields.push_back(item);
        if (!header_done) {
            header = fields;
            header_done = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
        rows.push_back(std::move(row));
    }

    auto meta_axis = [&](const std::string& key) -> std::optional<sw::Axis> {
        if (!t.metadata.count(key + "_name")) return std::nullopt;
        return sw::Axis{t.metadata.at(key + "_name"), std::strtod(t.metadata.at(key + "_start").c_str(), nullptr),
                        std::strtod(t.metadata.at(key + "_stop").c_str(), nullptr),
                        std::stoi(t.metadata.at(key + "_count"))};
    };
    const auto ax0 = meta_axis("axis0");
    const auto ax1 = meta_axis("axis1");
    if (ax0 && ax1) {
        t.axes = {*ax0, *ax1};
        for (const auto& row : rows) {
            t.values.push_back(row.back());
            t.flagged.push_back(std::isnan(row.back()) ? 1 : 0);
        }
    } else {
        std::size_t skip = 0;
        if (ax0) {
            t.axes = {*ax0};
            skip = 1;
        }
        for (std::size_t c = skip; c < header.size(); ++c) t.columns.push_back(header[c]);
        for (const auto& row : rows) {
            for (std::size_t c = skip; c < row.size(); ++c) {
                t.values.push_back(row[c]);
                t.flagged.push_back(std::isnan(row[c]) ? 1 : 0);
            }
        }
    }
    return t;
}

ManifestEntry emit_plot_script(const std::string& table_path, const std::string& style,
                               const std::string& script_path) {
    std::ifstream probe(table_path);
    if (!probe) throw std::runtime_error("table file not found: " + table_path);
    probe.close();
    const auto table = read_table(table_path);

    std::ostringstream os;
    os << "# gnuplot script generated by " << kToolVersion << "\n";
    os << "set datafile separator comma\n";
    os << "set term pngcairo size 960,720\n";
    os << "set output '" << plot_base(table_path) << ".png'\n";
    if (style == "density") {
        if (table.axes.size() != 2)
            throw ValidationError("density style needs a two-axis table");
        os << "set xlabel '" << table.axes[0].name << "'\n";
        os << "set ylabel '" << table.axes[1].name << "'\n";
        os << "set view map\n";
        os << "set dgrid3d " << table.axes[1].count << "," << table.axes[0].count << "\n";
        os << "splot '" << table_path << "' using 1:2:3 with pm3d notitle\n";
    } else if (style == "curves") {
        const std::size_t ncols = 1 + std::max<std::size_t>(table.columns.size(), 1);
        if (!table.axes.empty()) os << "set xlabel '" << table.axes[0].name << "'\n";
        os << "set key outside\n";
        os << "plot for [i=2:" << ncols << "] '" << table_path
           << "' using 1:i with lines title columnheader(i)\n";
    } else {
        throw ValidationError("plot style: expected density|curves");
    }
    write_file(script_path, os.str());
    return make_entry(script_path);
}

std::string fnv1a64_file(const std::string& path) { return hex64(fnv1a64(read_file(path))); }

OutputManifest run_command(const RunConfig& cfg) {
    const auto t_begin = std::chrono::steady_clock::now();
    OutputManifest man;
    man.parameter_echo = echo_parameters(cfg);

    const sw::EnvSpec espec = env_from_cfg(cfg);
    std::vector<FigureSet> outputs;

    if (cfg.command == "figure") {
        outputs = build_figure(cfg);
    } else if (cfg.command == "decoherence") {
        std::vector<double> svals = cfg.s_values;
        if (svals.empty())
            svals = (espec.family == sw::EnvFamily::Thermal) ? std::vector<double>{1.0, 4.0}
                                                             : std::vector<double>{1.0, 2.0, 3.0};
        outputs.push_back(
            {sw::decoherence_curves(espec, {"t", cfg.t_min, cfg.t_max, cfg.t_count}, svals), "",
             "curves"});
    } else if (cfg.command == "diffusion-map") {
        const double t0 = cfg.t_min > 0.0 ? cfg.t_min : (cfg.t_max - cfg.t_min) / cfg.t_count;
        outputs.push_back({sw::diffusion_map(espec, {"t", t0, cfg.t_max, cfg.t_count},
                                             {"s", cfg.s_min, cfg.s_max, cfg.s_count}),
                           "", "density"});
    } else if (cfg.command == "markovianity") {
        envmodels::MarkovReport rep =
            (espec.family == sw::EnvFamily::Thermal)
                ? envmodels::markovianity_report(espec.thermal_env(cfg.s), cfg.t_max, cfg.samples)
                : envmodels::markovianity_report(espec.noneq_env(cfg.s), cfg.t_max, cfg.samples);
        sw::SweepTable tab;
        tab.columns = {"t_lo", "t_hi"};
        for (const auto& iv : rep.negative_intervals.intervals) {
            tab.values.push_back(iv.first);
            tab.values.push_back(iv.second);
            tab.flagged.push_back(0);
            tab.flagged.push_back(0);
        }
        tab.metadata["tool"] = kToolVersion;
        tab.metadata["env"] = rep.environment_kind;
        tab.metadata["gamma0"] = sw::format_shortest(cfg.gamma0);
        tab.metadata["s"] = sw::format_shortest(cfg.s);
        tab.metadata["cutoff"] = sw::format_shortest(cfg.cutoff);
        if (espec.family == sw::EnvFamily::Thermal) {
            tab.metadata["temperature"] = sw::format_shortest(cfg.temperature);
        } else {
            tab.metadata["lambda"] = sw::format_shortest(cfg.lambda_param);
            tab.metadata["d"] = sw::format_shortest(cfg.d_param);
        }
        tab.metadata["window_t_max"] = sw::format_shortest(cfg.t_max);
        tab.metadata["samples"] = std::to_string(cfg.samples);
        tab.metadata["markovian"] = rep.is_markovian_on_window ? "true" : "false";
        tab.metadata["quantity"] = "negative windows of D(t)";
        if (rep.negative_intervals.first_crossing)
            tab.metadata["first_crossing"] =
                sw::format_shortest(*rep.negative_intervals.first_crossing);
        outputs.push_back({std::move(tab), "", ""});
        std::fprintf(stdout, "%s: %s on (0, %s]\n", rep.environment_kind.c_str(),
                     rep.is_markovian_on_window ? "Markovian" : "non-Markovian",
                     sw::format_shortest(cfg.t_max).c_str());
    } else if (cfg.command == "gp") {
        gp::GpRun run{qubit::BlochInitial(cfg.theta),
                      (espec.family == sw::EnvFamily::Thermal)
                          ? gp::EnvVariant(espec.thermal_env(cfg.s))
                          : gp::EnvVariant(espec.noneq_env(cfg.s)),
                      2.0 * kPi, cfg.grid};
        const gp::GpResult res = gp::gp_evaluate(run);
        sw::SweepTable tab;
        tab.columns = {"phi_g", "phi_u", "delta_phi", "delta_over_phi_u", "richardson_gap"};
        tab.values = {res.phi_g, res.phi_u, res.delta_phi, res.normalized_delta,
                      res.richardson_gap};
        tab.flagged.assign(5, 0);
        tab.metadata = echo_parameters(cfg);
        tab.metadata["grid_points"] = std::to_string(res.grid_points);
        tab.metadata["quantity"] = "geometric phase over one quasi-cycle";
        outputs.push_back({std::move(tab), "", ""});
    } else if (cfg.command == "gp-sweep") {
        if (cfg.sweep_axis == "s") {
            std::vector<double> g0s = cfg.gamma0_values;
            if (g0s.empty()) g0s = {0.001, 0.005, 0.01, 0.03};
            outputs.push_back({sw::gp_vs_s(espec, {"s", cfg.s_min, cfg.s_max, cfg.s_count}, g0s,
                                           cfg.theta, cfg.grid),
                               "", "curves"});
        } else {
            std::vector<double> svals = cfg.s_values;
            if (svals.empty()) svals = {1.0, 2.0, 2.5, 3.0};
            outputs.push_back(
                {sw::gp_vs_theta(espec, {"theta", cfg.theta_min, cfg.theta_max, cfg.theta_count},
                                 svals, cfg.grid),
                 "", "curves"});
        }
    }

    // write tables (+ optional plot scripts), then verify checksums
    const std::string stem = plot_base(cfg.out_path);
    const std::string ext = (cfg.format == "json") ? ".json" : ".csv";
    for (auto& fs : outputs) {
        const std::string path = stem + fs.suffix + ext;
        man.entries.push_back(write_table(fs.table, cfg.format, path));
        if (cfg.emit_plot && !fs.style.empty())
            man.entries.push_back(emit_plot_script(path, fs.style, stem + fs.suffix + ".gp"));
    }

    man.ok = true;
    for (const auto& e : man.entries) {
        try {
            const ManifestEntry again = make_entry(e.path);
            if (again.checksum != e.checksum || again.bytes != e.bytes) man.ok = false;
        } catch (const std::exception&) {
            man.ok = false;
        }
    }
    man.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t_begin)
                      .count();
    return man;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        const RunConfig cfg = load_config(args);
        const OutputManifest man = run_command(cfg);
        std::fputs(man.to_json().c_str(), stdout);
        return man.ok ? 0 : 1;
    } catch (const HelpShown&) {
        return 0;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace gpd::cli
