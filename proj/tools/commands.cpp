#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ombell/analytic.hpp"
#include "ombell/errors.hpp"
#include "ombell/parallel.hpp"
#include "ombell/selfcheck.hpp"

namespace ombell::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", value);
    return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", t);
    return buf;
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot write " + path.string());
    f << text;
}

// Every summary carries the normalised configuration that produced it.
void write_json(const fs::path& path, ordered_json j, const RunConfig& config) {
    j["config"] = ordered_json::parse(serialize_config(config));
    write_text(path, j.dump(2) + "\n");
}

PureWriteState init_state(const std::string& kind, double phase) {
    return kind == "separable" ? PureWriteState::separable(phase) : PureWriteState::bell(phase);
}

ordered_json fit_json(const std::optional<VisibilityFit>& f) {
    if (!f) return nullptr;
    return ordered_json{{"visibility", f->visibility},
                        {"mean", f->mean},
                        {"phase_rad", f->phase},
                        {"omega_rad_per_ns", f->omega},
                        {"residual", f->residual},
                        {"extrema_visibility", f->extrema_visibility},
                        {"confident", f->confident}};
}

}  // namespace

WriteRun execute_write(const RunConfig& config) {
    const SystemParams p = config.params();
    WriteRun run{config.write_space(), {}, {}, std::nullopt};
    const QuantumState init = thermal_state(run.space, p.n_th, p.n_th);
    run.trajectory = run_write(run.space, p, config.schedule(), init, config.propagation());
    run.heralds = herald_scan(run.trajectory, run.space);
    run.best = best_herald_index(run.heralds, config.readout.herald_time_ns);
    return run;
}

SemiclassicalState readout_initial(const RunConfig& config, const WriteRun* write) {
    const ModeSpace fluct = config.readout_space();
    const int d1 = fluct.dim(Mode::Mech1), d2 = fluct.dim(Mode::Mech2);
    if (config.readout.init != "heralded") {
        const Mat rm = mechanical_pure_state(init_state(config.readout.init, config.readout.bell_phase_rad).vector(), d1, d2);
        return prepare_readout_initial(rm, fluct, config.readout.herald_time_ns);
    }
    std::optional<WriteRun> own;
    if (!write) write = &own.emplace(execute_write(config));
    if (!write->best) throw NoClickError("write stage produced no heralding click");
    const HeraldPoint& h = write->heralds[*write->best];
    const Mat rm = adapt_mechanical_state(h.mechanical_state, write->space.dim(Mode::Mech1),
                                          write->space.dim(Mode::Mech2), d1, d2);
    return prepare_readout_initial(rm, fluct, h.time);
}

FringeScan execute_fringe(const RunConfig& config, const SemiclassicalState& init) {
    FringeSettings f = config.fringe_settings();
    f.centers = readout_grid(init.time + config.readout.first_center_offset_ns, config.readout.center_step_ns,
                             static_cast<std::size_t>(std::max(0, config.readout.center_count)));
    return fringe_scan(config.readout_space(), config.params(), init, f, config.propagation());
}

std::vector<SweepRow> execute_sweep(const RunConfig& config, SweepAxis axis) {
    const std::vector<double>& grid =
        axis == SweepAxis::Thermal ? config.sweep.thermal_n_th : config.sweep.dephasing_eta_over_kappa;
    if (grid.empty()) throw ParameterError("sweep grid is empty");
    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), config.jobs, [&](std::size_t k) {
        RunConfig c = config;
        c.jobs = 1;
        c.readout.init = "heralded";
        if (axis == SweepAxis::Thermal)
            c.physics.n_th = grid[k];
        else
            c.physics.eta_over_kappa = grid[k];
        c.validate();
        SweepRow& row = rows[k];
        row.axis_value = grid[k];
        row.visibility = kNaN;
        const WriteRun w = execute_write(c);
        if (!w.best) {
            row.note = "no click";
            return;
        }
        const HeraldPoint& h = w.heralds[*w.best];
        row.herald_time = h.time;
        row.concurrence = h.concurrence.value_or(0.0);
        try {
            const FringeScan scan = execute_fringe(c, readout_initial(c, &w));
            if (scan.detector)
                row.visibility = scan.detector->visibility;
            else
                row.note = scan.fit_error;
        } catch (const DegenerateStateError& e) {
            row.note = e.what();
        }
    });
    return rows;
}

namespace {

struct Flags {
    std::string config_path;
    std::string out_dir;
    std::optional<unsigned> jobs;
    std::optional<std::uint64_t> seed;
    bool separable = false;
    std::optional<double> amp_readout;
    std::optional<double> amp_write;
};

RunConfig resolve(const Flags& fl) {
    RunConfig c = fl.config_path.empty() ? RunConfig{} : load_config(fl.config_path);
    if (!fl.out_dir.empty()) c.output_dir = fl.out_dir;
    if (fl.jobs) c.jobs = *fl.jobs;
    if (fl.seed) c.seed = *fl.seed;
    if (fl.separable) c.readout.init = "separable";
    if (fl.amp_readout) c.readout.pulse.amplitude_over_kappa = *fl.amp_readout;
    if (fl.amp_write) c.write.pulse.amplitude_over_kappa = *fl.amp_write;
    c.validate();
    fs::create_directories(c.output_dir);
    return c;
}

int cmd_write_run(const RunConfig& c, std::ostream& out) {
    const WriteRun w = execute_write(c);
    std::ostringstream csv;
    csv << "t_ns,n_c,n_b1,n_b2,n_d,C,herald_prob\n";
    for (std::size_t k = 0; k < w.trajectory.times.size(); ++k) {
        const auto& n = w.trajectory.occupations[k];
        const HeraldPoint& h = w.heralds[k];
        csv << fmt_time(w.trajectory.times[k]) << ',' << fmt(n[0]) << ',' << fmt(n[1]) << ',' << fmt(n[2]) << ','
            << fmt(n[3]) << ',' << fmt(h.concurrence.value_or(0.0)) << ',' << fmt(h.herald_probability) << '\n';
    }
    const fs::path dir = c.output_dir;
    write_text(dir / "write_run.csv", csv.str());

    ordered_json j;
    j["dims"] = c.truncation.write_dims;
    if (w.best) {
        const HeraldPoint& h = w.heralds[*w.best];
        const double rate = c.params().kappa * h.cavity_occupation * 1e9;  // photons per second
        j["C_max"] = num(h.concurrence.value_or(0.0));
        j["t_P_ns"] = h.time;
        j["n_c_at_t_P"] = h.cavity_occupation;
        j["herald_prob_at_t_P"] = h.herald_probability;
        j["heralding_rate_per_s"] = rate;
        j["retained_probability"] = h.retained_probability;
    } else {
        j["C_max"] = nullptr;
        j["t_P_ns"] = nullptr;
    }
    j["steps_accepted"] = w.trajectory.stats.accepted;
    j["steps_rejected"] = w.trajectory.stats.rejected;
    write_json(dir / "write_run.json", j, c);
    out << "write-run: " << w.trajectory.times.size() << " rows -> " << (dir / "write_run.csv").string() << '\n';
    if (w.best)
        out << "C_max " << fmt(w.heralds[*w.best].concurrence.value_or(0.0)) << " at t_P "
            << fmt_time(w.heralds[*w.best].time) << " ns\n";
    return kExitOk;
}

int cmd_fringe_scan(const RunConfig& c, std::ostream& out) {
    const SemiclassicalState init = readout_initial(c);
    const FringeScan scan = execute_fringe(c, init);
    std::ostringstream csv;
    csv << "t_R_ns,I_detector,I_cavity,g2_detector\n";
    for (const FringePoint& p : scan.points)
        csv << fmt_time(p.readout_center) << ',' << fmt(p.cut.total_occupation(Mode::Detector)) << ','
            << fmt(p.cut.total_occupation(Mode::Cavity)) << ','
            << fmt(p.cut.g2_detector.defined ? p.cut.g2_detector.value : kNaN) << '\n';
    const fs::path dir = c.output_dir;
    write_text(dir / "fringe_scan.csv", csv.str());

    const SystemParams prm = c.params();
    ordered_json j;
    j["V_detector"] = scan.detector ? num(scan.detector->visibility) : nullptr;
    j["V_cavity"] = scan.cavity ? num(scan.cavity->visibility) : nullptr;
    j["fit_residual"] = scan.detector ? num(scan.detector->residual) : nullptr;
    j["I0_detector"] = scan.detector ? num(scan.detector->mean) : nullptr;
    j["I0_cavity"] = scan.cavity ? num(scan.cavity->mean) : nullptr;
    j["init"] = c.readout.init;
    j["readout_start_ns"] = init.time;
    j["tau_cut_ns"] = c.fringe_settings().tau_cut;
    j["beat_frequency_over_2pi_MHz"] = units::to_MHz(prm.omega2 - prm.omega1);
    j["fitted_frequency_over_2pi_MHz"] =
        scan.detector_frequency ? num(units::to_MHz(scan.detector_frequency->omega)) : nullptr;
    if (c.readout.init != "heralded")
        j["V_analytic"] = analytic_visibility(init_state(c.readout.init, c.readout.bell_phase_rad));
    j["detector_fit"] = fit_json(scan.detector);
    j["cavity_fit"] = fit_json(scan.cavity);
    j["detector_fluctuation_fit"] = fit_json(scan.detector_fluctuation);
    if (!scan.fit_error.empty()) j["fit_error"] = scan.fit_error;
    write_json(dir / "fringe_scan.json", j, c);
    out << "fringe-scan: " << scan.points.size() << " points -> " << (dir / "fringe_scan.csv").string() << '\n';
    if (!scan.detector || !scan.cavity) {
        out << "fit failed: " << scan.fit_error << '\n';
        return kExitNumerical;
    }
    out << "V_detector " << fmt(scan.detector->visibility) << "  V_cavity " << fmt(scan.cavity->visibility) << '\n';
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, const std::string& axis_name, std::ostream& out) {
    const SweepAxis axis = axis_name == "thermal" ? SweepAxis::Thermal : SweepAxis::Dephasing;
    const std::vector<SweepRow> rows = execute_sweep(c, axis);
    std::ostringstream csv;
    csv << "axis_value,C,V\n";
    ordered_json j;
    j["axis"] = axis_name;
    j["axis_unit"] = axis == SweepAxis::Thermal ? "n_th" : "eta_over_kappa";
    j["rows"] = ordered_json::array();
    for (const SweepRow& r : rows) {
        csv << fmt(r.axis_value) << ',' << fmt(r.concurrence) << ',' << fmt(r.visibility) << '\n';
        j["rows"].push_back({{"axis_value", r.axis_value},
                             {"C", r.concurrence},
                             {"V", num(r.visibility)},
                             {"t_P_ns", r.herald_time},
                             {"note", r.note}});
    }
    const fs::path dir = c.output_dir;
    write_text(dir / ("sweep_" + axis_name + ".csv"), csv.str());
    write_json(dir / ("sweep_" + axis_name + ".json"), j, c);
    out << "sweep " << axis_name << ": " << rows.size() << " rows\n";
    return kExitOk;
}

int cmd_readout_run(const RunConfig& c, std::ostream& out) {
    const SemiclassicalState init = readout_initial(c);
    const ProtocolSchedule s = c.schedule();
    const double end = s.readout.center + c.readout.trajectory_end_offset_ns;
    if (!(end > init.time)) throw ParameterError("readout-run window is empty");
    std::vector<double> samples;
    for (double t = init.time; t <= end + 1e-9; t += c.readout.trajectory_sample_step_ns) samples.push_back(t);
    const ReadoutTrajectory tr = run_readout(c.readout_space(), c.params(), init, s.readout, samples, c.propagation());

    std::ostringstream csv;
    csv << "t_ns,n_c_cl,n_b1_cl,n_b2_cl,n_d_cl,n_c_fl,n_b1_fl,n_b2_fl,n_d_fl,g2_detector\n";
    for (const ReadoutSample& r : tr.samples) {
        csv << fmt_time(r.time);
        for (Mode m : kAllModes) csv << ',' << fmt(r.classical_occupation(m));
        for (double n : r.fluctuation) csv << ',' << fmt(n);
        csv << ',' << fmt(r.g2_detector.defined ? r.g2_detector.value : kNaN) << '\n';
    }
    const fs::path dir = c.output_dir;
    write_text(dir / "readout_run.csv", csv.str());
    ordered_json j{{"init", c.readout.init},
                   {"readout_center_ns", s.readout.center},
                   {"amplitude_over_kappa", c.readout.pulse.amplitude_over_kappa},
                   {"width_ns", s.readout.width},
                   {"samples", tr.samples.size()},
                   {"steps_accepted", tr.stats.accepted}};
    write_json(dir / "readout_run.json", j, c);
    out << "readout-run: " << tr.samples.size() << " rows -> " << (dir / "readout_run.csv").string() << '\n';
    return kExitOk;
}

int cmd_analytic(const RunConfig& c, std::ostream& out) {
    ordered_json j;
    j["states"] = ordered_json::array();
    auto add = [&](const std::string& name, const PureWriteState& s) {
        const double C = analytic_concurrence(s);
        ordered_json row{{"name", name}, {"C", C}, {"C_over_2_minus_C", visibility_from_concurrence(C)}};
        try {
            row["V"] = analytic_visibility(s);
        } catch (const DomainError&) {
            row["V"] = nullptr;
        }
        j["states"].push_back(row);
        out << name << ": C " << fmt(C) << "  V " << (row["V"].is_null() ? "n/a" : fmt(row["V"].get<double>()))
            << '\n';
    };
    add("bell", PureWriteState::bell(c.readout.bell_phase_rad));
    add("separable", PureWriteState::separable(c.readout.bell_phase_rad));
    // The c00 = 0 family with equal single-excitation weights, swept over |c11|^2.
    for (double w11 : {0.0, 0.1, 0.25, 0.5, 0.75}) {
        const double a = std::sqrt((1.0 - w11) / 2.0);
        char name[48];
        std::snprintf(name, sizeof name, "family_w11_%.2f", w11);
        add(name, PureWriteState{0.0, a, a, std::sqrt(w11)});
    }
    if (!c.extra_modes.empty()) {
        std::vector<ExtraMode> modes;
        for (const auto& m : c.extra_modes) modes.push_back(m.to_mode());
        const double eta = dephasing_rate_estimate(modes);
        j["dephasing_eta_rad_per_ns"] = eta;
        j["dephasing_eta_over_kappa"] = eta / c.params().kappa;
        out << "dephasing eta/kappa " << fmt(eta / c.params().kappa) << '\n';
    }
    write_json(fs::path(c.output_dir) / "analytic.json", j, c);
    return kExitOk;
}

int cmd_selfcheck(const RunConfig& c, bool quick, std::ostream& out) {
    SelfcheckOptions o;
    if (quick) {
        o.include_truncation = false;
        o.include_gauge = false;
        o.random_states = 200;
    }
    const SelfcheckReport r = run_selfcheck(c, o);
    ordered_json j = ordered_json::array();
    for (const CheckResult& k : r.checks) {
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-55s value %.3e  bound %.1e", k.passed ? "PASS" : "FAIL",
                      k.name.c_str(), k.value, k.threshold);
        out << line;
        if (!k.detail.empty()) out << "  (" << k.detail << ')';
        out << '\n';
        j.push_back({{"name", k.name},
                     {"passed", k.passed},
                     {"value", num(k.value)},
                     {"threshold", k.threshold},
                     {"detail", k.detail}});
    }
    write_json(fs::path(c.output_dir) / "selfcheck.json", j, c);
    out << (r.all_passed() ? "selfcheck: all green\n" : "selfcheck: FAILURES\n");
    return r.all_passed() ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optomechanical Bell-state simulator"};
    app.require_subcommand(1);
    Flags fl;
    app.add_option("--config", fl.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", fl.out_dir, "output directory");
    app.add_option("--jobs", fl.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", fl.seed, "seed for randomized checks");
    app.add_flag("--separable-init", fl.separable, "start the readout from the separable state");
    app.add_option("--amplitude-readout-kappa", fl.amp_readout, "readout amplitude in units of kappa");
    app.add_option("--amplitude-write", fl.amp_write, "write amplitude in units of kappa");
    app.fallthrough();

    auto* write_cmd = app.add_subcommand("write-run", "heralding stage: occupations and C(t_P)");
    auto* fringe_cmd = app.add_subcommand("fringe-scan", "readout fringes versus readout time");
    std::string axis;
    auto* sweep_cmd = app.add_subcommand("sweep", "thermal or dephasing sweep of C and V");
    sweep_cmd->add_option("axis", axis, "thermal | dephasing")->required()->check(CLI::IsMember({"thermal", "dephasing"}));
    auto* readout_cmd = app.add_subcommand("readout-run", "single readout trajectory");
    auto* analytic_cmd = app.add_subcommand("analytic", "closed-form C and V");
    bool quick = false;
    auto* self_cmd = app.add_subcommand("selfcheck", "invariant and property suite");
    self_cmd->add_flag("--quick", quick, "skip the gauge and truncation runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const RunConfig c = resolve(fl);
        if (*write_cmd) return cmd_write_run(c, out);
        if (*fringe_cmd) return cmd_fringe_scan(c, out);
        if (*sweep_cmd) return cmd_sweep(c, axis, out);
        if (*readout_cmd) return cmd_readout_run(c, out);
        if (*analytic_cmd) return cmd_analytic(c, out);
        if (*self_cmd) return cmd_selfcheck(c, quick, out);
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NoClickError& e) {
        err << "no click: " << e.what() << '\n';
        return kExitNoClick;
    } catch (const DegenerateStateError& e) {
        err << "degenerate state: " << e.what() << '\n';
        return kExitNoClick;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace ombell::cli
