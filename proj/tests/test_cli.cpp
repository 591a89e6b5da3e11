#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gpdephase/cli.hpp"

using namespace gpd;
using namespace gpd::cli;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = 3.14159265358979323846;

fs::path test_dir() {
    static fs::path dir = [] {
        auto p = fs::temp_directory_path() / "gpdephase_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}
} // namespace

TEST_CASE("load_config fills figure defaults") {
    auto cfg = load_config({"figure", "fig1"});
    CHECK(cfg.command == "figure");
    CHECK(cfg.figure == "fig1");
    CHECK(cfg.gamma0 == 0.1);
    CHECK(cfg.cutoff == 10.0);
    CHECK(cfg.out_path == "fig1.csv");
}

TEST_CASE("load_config rejects out-of-domain values naming the field") {
    try {
        load_config({"decoherence", "--s", "-2"});
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("s:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config({"gp", "--env", "plasma"}), ValidationError);
    CHECK_THROWS_AS(load_config({"gp", "--format", "xml"}), ValidationError);
    CHECK_THROWS_AS(load_config({"figure", "fig9"}), ValidationError);
    CHECK_THROWS_AS(load_config({"gp-sweep", "--sweep", "q"}), ValidationError);
    CHECK_THROWS_AS(load_config({"--bogus-flag"}), ValidationError);
}

TEST_CASE("flags override config file values") {
    const auto cfgfile = test_dir() / "run.cfg";
    spit(cfgfile, "[environment]\nkind = thermal\ngamma0 = 0.01\ns = 2.0\n"
                  "[numeric]\ngrid = 2048\n[output]\nformat = csv\n");
    auto file_only = load_config({"gp", "--config", cfgfile.string()});
    CHECK(file_only.gamma0 == 0.01);
    CHECK(file_only.grid == 2048);
    auto overridden = load_config({"gp", "--config", cfgfile.string(), "--gamma0", "0.03"});
    CHECK(overridden.gamma0 == 0.03);
    CHECK(overridden.s == 2.0);

    spit(test_dir() / "bad.cfg", "[environment]\nfrobnicate = 1\n");
    try {
        load_config({"gp", "--config", (test_dir() / "bad.cfg").string()});
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
    }
}

TEST_CASE("write_table CSV shape and round-trip") {
    sweep::SweepTable tab;
    tab.axes = {{"t", 0.0, 1.0, 2}, {"s", 1.0, 4.0, 2}};
    tab.values = {0.125, -3.0, 1.0 / 3.0, 9.87654321e-7};
    tab.flagged = {0, 0, 0, 0};
    tab.metadata["figure"] = "demo";
    tab.metadata["gamma0"] = "0.1";

    const auto path = (test_dir() / "grid.csv").string();
    auto entry = write_table(tab, "csv", path);
    CHECK(entry.bytes > 0);
    CHECK(entry.checksum.size() == 16);

    const std::string body = slurp(path);
    CHECK(body.find("\r") == std::string::npos);
    // header + exactly 4 data rows after the '#' metadata echo
    const auto header_at = body.find("t,s,value\n");
    REQUIRE(header_at != std::string::npos);
    const std::string data = body.substr(header_at);
    CHECK(std::count(data.begin(), data.end(), '\n') == 5);
    CHECK(body.find("# figure=demo\n") != std::string::npos);

    auto back = read_table(path);
    REQUIRE(back.values.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(back.values[i] == tab.values[i]); // bit-exact
    CHECK(back.metadata.at("figure") == "demo");
    REQUIRE(back.axes.size() == 2);
    CHECK(back.axes[1].name == "s");
}

TEST_CASE("write_table JSON round-trip with flagged points") {
    sweep::SweepTable tab;
    tab.axes = {{"s", 0.0, 1.0, 3}};
    tab.columns = {"a", "b"};
    tab.values = {1.0, 2.0, std::nan(""), 4.0, 5.0, 6.0};
    tab.flagged = {0, 0, 1, 0, 0, 0};
    tab.metadata["quantity"] = "demo";

    const auto path = (test_dir() / "family.json").string();
    write_table(tab, "json", path);
    CHECK(slurp(path).find("null") != std::string::npos);

    auto back = read_table(path);
    REQUIRE(back.values.size() == 6);
    CHECK(back.flagged[2] == 1);
    CHECK(std::isnan(back.values[2]));
    CHECK(back.values[5] == 6.0);
    CHECK(back.columns == std::vector<std::string>{"a", "b"});
}

TEST_CASE("flagged points serialize as nan in CSV") {
    sweep::SweepTable tab;
    tab.axes = {{"s", 0.0, 1.0, 2}};
    tab.columns = {"v"};
    tab.values = {1.5, std::nan("")};
    tab.flagged = {0, 1};
    const auto path = (test_dir() / "flagged.csv").string();
    write_table(tab, "csv", path);
    CHECK(slurp(path).find("nan") != std::string::npos);
}

TEST_CASE("gp command produces a single-row table") {
    RunConfig cfg = load_config({"gp", "--env", "thermal", "--s", "3", "--gamma0", "0.01",
                                 "--theta", "1.0472", "--out",
                                 (test_dir() / "gp.csv").string()});
    auto man = run_command(cfg);
    CHECK(man.ok);
    REQUIRE(man.entries.size() == 1);
    auto tab = read_table(man.entries[0].path);
    REQUIRE(tab.columns.size() == 5);
    REQUIRE(tab.values.size() == 5);
    const double phi_g = tab.values[0], phi_u = tab.values[1], dphi = tab.values[2];
    CHECK(std::abs(phi_u - kPi / 2.0) < 1e-3); // theta given to 5 digits
    CHECK(std::abs(dphi - (phi_g - phi_u)) < 1e-14);
    const double expected = 4.0 * kPi * 0.01 * std::sin(1.0472) * std::sin(1.0472) *
                            std::cos(1.0472);
    CHECK(std::abs(std::abs(dphi) - expected) / expected < 0.10);
}

TEST_CASE("markovianity command reports the noneq bath as non-Markovian") {
    RunConfig cfg = load_config({"markovianity", "--env", "noneq", "--s", "1", "--t-max", "3",
                                 "--out", (test_dir() / "markov.csv").string()});
    auto man = run_command(cfg);
    CHECK(man.ok);
    auto tab = read_table(man.entries[0].path);
    CHECK(tab.metadata.at("markovian") == "false");
    CHECK(tab.values.size() >= 2);

    RunConfig ohmic = load_config({"markovianity", "--env", "thermal", "--s", "1", "--t-max",
                                   "10", "--out", (test_dir() / "markov2.csv").string()});
    auto man2 = run_command(ohmic);
    auto tab2 = read_table(man2.entries[0].path);
    CHECK(tab2.metadata.at("markovian") == "true");
    CHECK(tab2.values.empty());
}

TEST_CASE("figure fig2 regenerates two thermal curves") {
    RunConfig cfg = load_config({"figure", "fig2", "--out", (test_dir() / "fig2.csv").string()});
    auto man = run_command(cfg);
    CHECK(man.ok);
    auto tab = read_table(man.entries[0].path);
    CHECK(tab.metadata.at("figure") == "fig2");
    CHECK(tab.metadata.at("gamma0") == "0.1");
    CHECK(tab.metadata.at("cutoff") == "10");
    REQUIRE(tab.columns.size() == 2);
    CHECK(tab.columns[0].find("s=1") != std::string::npos);
    CHECK(tab.columns[1].find("s=4") != std::string::npos);
}

TEST_CASE("plot script emission styles") {
    RunConfig fig1 = load_config({"figure", "fig1", "--plot-script", "--out",
                                  (test_dir() / "fig1.csv").string()});
    auto man = run_command(fig1);
    CHECK(man.ok);
    REQUIRE(man.entries.size() == 2);
    const std::string script = slurp(man.entries[1].path);
    CHECK(script.find("pm3d") != std::string::npos);   // density style
    CHECK(script.find("fig1.csv") != std::string::npos);

    RunConfig dec = load_config({"decoherence", "--plot-script", "--out",
                                 (test_dir() / "dec.csv").string()});
    auto man2 = run_command(dec);
    const std::string script2 = slurp(man2.entries[1].path);
    CHECK(script2.find("columnheader") != std::string::npos); // curve style
    CHECK_THROWS(emit_plot_script((test_dir() / "missing.csv").string(), "curves",
                                  (test_dir() / "x.gp").string()));
    CHECK_THROWS_AS(load_config({"figure", "fig1", "--plot-script", "--format", "json"}),
                    ValidationError);
}

TEST_CASE("reruns are byte-identical") {
    const auto out1 = (test_dir() / "rerun1.csv").string();
    const auto out2 = (test_dir() / "rerun2.csv").string();
    auto m1 = run_command(load_config({"diffusion-map", "--t-count", "40", "--s-count", "21",
                                       "--out", out1}));
    auto m2 = run_command(load_config({"diffusion-map", "--t-count", "40", "--s-count", "21",
                                       "--out", out2}));
    CHECK(m1.ok);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(m1.entries[0].checksum == m2.entries[0].checksum);
    // checksum matches an independent recomputation
    CHECK(m1.entries[0].checksum == fnv1a64_file(out1));
}

TEST_CASE("binary end-to-end: exit codes and manifest") {
    const std::string bin = GPDEPHASE_CLI_BIN;
    const auto out = (test_dir() / "e2e_gp.csv").string();
    const std::string cmd = bin + " gp --env thermal --s 3 --gamma0 0.01 --theta 1.0472 --out " +
                            out + " > " + (test_dir() / "stdout.json").string();
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(out));
    const std::string manifest = slurp(test_dir() / "stdout.json");
    CHECK(manifest.find("\"ok\": true") != std::string::npos);
    CHECK(manifest.find("e2e_gp.csv") != std::string::npos);

    const std::string bad = bin + " decoherence --s -2 --out " +
                            (test_dir() / "never.csv").string() + " 2> /dev/null";
    CHECK(std::system(bad.c_str()) != 0);
}
