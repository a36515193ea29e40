#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace ombell::cli;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ombell_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Small truncation and a short window keep these runs under a few seconds.
fs::path tiny_config(const fs::path& dir) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << R"({
  "truncation": {"write_dims": [2, 2, 2, 2], "readout_dims": [2, 2, 2, 2]},
  "write": {"end_ns": 40, "sample_step_ns": 2},
  "sweep": {"thermal_n_th": [0.0]},
  "readout": {"center_count": 8, "center_step_ns": 0.8, "pulse": {"amplitude_over_kappa": 5}}
})";
    return p;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "ombell");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors") {
        CHECK(run({}) == kExitUsage);
        CHECK(run({"frobnicate"}) == kExitUsage);
        CHECK(run({"sweep", "pressure"}) == kExitUsage);
        CHECK(run({"--config", "/nonexistent.json", "analytic"}) == kExitUsage);
        const fs::path d = scratch("usage");
        std::ofstream(d / "bad.json") << R"({"unknown_key": 3})";
        CHECK(run({"--config", (d / "bad.json").string(), "--out", d.string(), "analytic"}) == kExitUsage);
    }

    TEST_CASE("write-run output contract and determinism") {
        const fs::path d = scratch("write");
        const std::string cfg = tiny_config(d).string();
        REQUIRE(run({"--config", cfg, "--out", (d / "a").string(), "write-run"}) == kExitOk);
        REQUIRE(run({"--config", cfg, "--out", (d / "b").string(), "write-run"}) == kExitOk);
        const std::string a = slurp(d / "a" / "write_run.csv");
        CHECK(a == slurp(d / "b" / "write_run.csv"));
        const auto rows = lines(a);
        REQUIRE(rows.size() == 22);
        CHECK(rows[0] == "t_ns,n_c,n_b1,n_b2,n_d,C,herald_prob");
        CHECK(fs::exists(d / "a" / "write_run.json"));
    }

    TEST_CASE("write-run with the drive off has no concurrence") {
        const fs::path d = scratch("nodrive");
        const std::string cfg = tiny_config(d).string();
        REQUIRE(run({"--config", cfg, "--out", d.string(), "--amplitude-write", "0", "write-run"}) == kExitOk);
        const auto rows = lines(slurp(d / "write_run.csv"));
        for (std::size_t k = 1; k < rows.size(); ++k) {
            const std::string c = rows[k].substr(0, rows[k].rfind(','));
            CHECK(std::stod(c.substr(c.rfind(',') + 1)) == 0.0);
        }
    }

    TEST_CASE("fringe-scan writes CSV and summary") {
        const fs::path d = scratch("fringe");
        const std::string cfg = tiny_config(d).string();
        std::string text;
        const int code = run({"--config", cfg, "--out", d.string(), "fringe-scan"}, &text);
        CHECK_MESSAGE((code == kExitOk || code == kExitNumerical), text);
        const auto rows = lines(slurp(d / "fringe_scan.csv"));
        REQUIRE(rows.size() == 9);
        CHECK(rows[0] == "t_R_ns,I_detector,I_cavity,g2_detector");
        const std::string js = slurp(d / "fringe_scan.json");
        CHECK(js.find("\"V_detector\"") != std::string::npos);
        CHECK(js.find("\"V_cavity\"") != std::string::npos);
        CHECK(js.find("\"fit_residual\"") != std::string::npos);
    }

    TEST_CASE("empty readout grid is a usage error") {
        const fs::path d = scratch("emptygrid");
        std::ofstream(d / "c.json") << R"({"readout": {"center_count": 0}})";
        CHECK(run({"--config", (d / "c.json").string(), "--out", d.string(), "fringe-scan"}) == kExitUsage);
    }

    TEST_CASE("single-point sweep gives a single row") {
        const fs::path d = scratch("sweep");
        const std::string cfg = tiny_config(d).string();
        std::string text;
        const int code = run({"--config", cfg, "--out", d.string(), "sweep", "thermal"}, &text);
        CHECK_MESSAGE(code == kExitOk, text);
        const auto rows = lines(slurp(d / "sweep_thermal.csv"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == "axis_value,C,V");
    }

    TEST_CASE("analytic command") {
        const fs::path d = scratch("analytic");
        std::string text;
        CHECK(run({"--out", d.string(), "analytic"}, &text) == kExitOk);
        CHECK(text.find("bell: C 1.0000000000e+00  V 1.0000000000e+00") != std::string::npos);
        CHECK(fs::exists(d / "analytic.json"));
    }

    TEST_CASE("readout-run columns") {
        const fs::path d = scratch("readout");
        std::ofstream(d / "c.json") << R"({
  "truncation": {"readout_dims": [2, 2, 2, 2]},
  "readout": {"pulse": {"amplitude_over_kappa": 5, "center_ns": 100}, "trajectory_end_offset_ns": 10}
})";
        REQUIRE(run({"--config", (d / "c.json").string(), "--out", d.string(), "readout-run"}) == kExitOk);
        const auto rows = lines(slurp(d / "readout_run.csv"));
        CHECK(rows[0] == "t_ns,n_c_cl,n_b1_cl,n_b2_cl,n_d_cl,n_c_fl,n_b1_fl,n_b2_fl,n_d_fl,g2_detector");
        CHECK(rows.size() == 56);
    }
}
