#include "ombell/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ombell/errors.hpp"

namespace ombell {

using nlohmann::json;

SystemParams PhysicsConfig::to_params() const {
    SystemParams p;
    p.omega1 = units::from_MHz(omega1_over_2pi_MHz);
    p.omega2 = units::from_MHz(omega2_over_2pi_MHz);
    p.g1 = units::from_kHz(g1_over_2pi_kHz);
    p.g2 = units::from_kHz(g2_over_2pi_kHz);
    p.gamma1 = units::from_MHz(gamma1_over_2pi_MHz);
    p.gamma2 = units::from_MHz(gamma2_over_2pi_MHz);
    p.kappa = units::from_MHz(kappa_over_2pi_MHz);
    p.kappa_d = kappa_d_over_kappa * p.kappa;
    p.zeta = zeta_over_kappa * p.kappa;
    p.n_th = n_th;
    p.eta = eta_over_kappa * p.kappa;
    p.validate();
    return p;
}

PulseSpec PulseConfig::to_pulse(double kappa) const {
    PulseSpec s{amplitude_over_kappa * kappa, center_ns, width_ns, units::from_MHz(detuning_over_2pi_MHz)};
    s.validate();
    return s;
}

ExtraMode ExtraModeConfig::to_mode() const {
    return {units::from_MHz(omega_over_2pi_MHz), units::from_MHz(gamma_over_2pi_MHz), units::from_kHz(g_over_2pi_kHz),
            n_th};
}

namespace {

// Strict reader: unknown keys are errors so a misspelt unit never goes unnoticed.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ParameterError(where_ + " must be a JSON object");
    }
    // Call once every key has been requested.
    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw ParameterError("unknown config key '" + where_ + "." + key + "'");
    }

    template <class T>
    void get(const char* key, T& target) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            target = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ParameterError("config key '" + where_ + "." + key + "': " + e.what());
        }
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void read_pulse(const json& j, const std::string& where, PulseConfig& p) {
    Reader r(j, where);
    r.get("amplitude_over_kappa", p.amplitude_over_kappa);
    r.get("center_ns", p.center_ns);
    r.get("width_ns", p.width_ns);
    r.get("detuning_over_2pi_MHz", p.detuning_over_2pi_MHz);
    r.finish();
}

json write_pulse(const PulseConfig& p) {
    return {{"amplitude_over_kappa", p.amplitude_over_kappa},
            {"center_ns", p.center_ns},
            {"width_ns", p.width_ns},
            {"detuning_over_2pi_MHz", p.detuning_over_2pi_MHz}};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    {
        Reader r(root, "config");
        if (const json* j = r.sub("physics")) {
            Reader p(*j, "physics");
            auto& x = c.physics;
            p.get("omega1_over_2pi_MHz", x.omega1_over_2pi_MHz);
            p.get("omega2_over_2pi_MHz", x.omega2_over_2pi_MHz);
            p.get("g1_over_2pi_kHz", x.g1_over_2pi_kHz);
            p.get("g2_over_2pi_kHz", x.g2_over_2pi_kHz);
            p.get("gamma1_over_2pi_MHz", x.gamma1_over_2pi_MHz);
            p.get("gamma2_over_2pi_MHz", x.gamma2_over_2pi_MHz);
            p.get("kappa_over_2pi_MHz", x.kappa_over_2pi_MHz);
            p.get("kappa_d_over_kappa", x.kappa_d_over_kappa);
            p.get("zeta_over_kappa", x.zeta_over_kappa);
            p.get("n_th", x.n_th);
            p.get("eta_over_kappa", x.eta_over_kappa);
            p.finish();
        }
        if (const json* j = r.sub("truncation")) {
            Reader t(*j, "truncation");
            t.get("write_dims", c.truncation.write_dims);
            t.get("readout_dims", c.truncation.readout_dims);
            t.get("max_total_dim", c.truncation.max_total_dim);
            t.finish();
        }
        if (const json* j = r.sub("write")) {
            Reader w(*j, "write");
            if (const json* pj = w.sub("pulse")) read_pulse(*pj, "write.pulse", c.write.pulse);
            w.get("start_ns", c.write.start_ns);
            w.get("end_ns", c.write.end_ns);
            w.get("sample_step_ns", c.write.sample_step_ns);
            w.finish();
        }
        if (const json* j = r.sub("readout")) {
            Reader w(*j, "readout");
            auto& x = c.readout;
            if (const json* pj = w.sub("pulse")) read_pulse(*pj, "readout.pulse", x.pulse);
            w.get("herald_time_ns", x.herald_time_ns);
            w.get("first_center_offset_ns", x.first_center_offset_ns);
            w.get("center_step_ns", x.center_step_ns);
            w.get("center_count", x.center_count);
            w.get("tau_cut_over_width", x.tau_cut_over_width);
            w.get("init", x.init);
            w.get("bell_phase_rad", x.bell_phase_rad);
            w.get("trajectory_end_offset_ns", x.trajectory_end_offset_ns);
            w.get("trajectory_sample_step_ns", x.trajectory_sample_step_ns);
            w.finish();
        }
        if (const json* j = r.sub("integrator")) {
            Reader w(*j, "integrator");
            w.get("method", c.integrator.method);
            w.get("rtol", c.integrator.rtol);
            w.get("atol", c.integrator.atol);
            w.get("fixed_step_ns", c.integrator.fixed_step_ns);
            w.get("check_positivity", c.integrator.check_positivity);
            w.finish();
        }
        if (const json* j = r.sub("sweep")) {
            Reader w(*j, "sweep");
            w.get("thermal_n_th", c.sweep.thermal_n_th);
            w.get("dephasing_eta_over_kappa", c.sweep.dephasing_eta_over_kappa);
            w.finish();
        }
        if (const json* j = r.sub("extra_modes")) {
            if (!j->is_array()) throw ParameterError("extra_modes must be an array");
            for (std::size_t k = 0; k < j->size(); ++k) {
                ExtraModeConfig m;
                Reader w(j->at(k), "extra_modes[" + std::to_string(k) + "]");
                w.get("omega_over_2pi_MHz", m.omega_over_2pi_MHz);
                w.get("gamma_over_2pi_MHz", m.gamma_over_2pi_MHz);
                w.get("g_over_2pi_kHz", m.g_over_2pi_kHz);
                w.get("n_th", m.n_th);
                w.finish();
                c.extra_modes.push_back(m);
            }
        }
        r.get("output_dir", c.output_dir);
        r.get("seed", c.seed);
        r.get("jobs", c.jobs);
        r.finish();
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    json root;
    const auto& p = c.physics;
    root["physics"] = {{"omega1_over_2pi_MHz", p.omega1_over_2pi_MHz}, {"omega2_over_2pi_MHz", p.omega2_over_2pi_MHz},
                       {"g1_over_2pi_kHz", p.g1_over_2pi_kHz},         {"g2_over_2pi_kHz", p.g2_over_2pi_kHz},
                       {"gamma1_over_2pi_MHz", p.gamma1_over_2pi_MHz}, {"gamma2_over_2pi_MHz", p.gamma2_over_2pi_MHz},
                       {"kappa_over_2pi_MHz", p.kappa_over_2pi_MHz},   {"kappa_d_over_kappa", p.kappa_d_over_kappa},
                       {"zeta_over_kappa", p.zeta_over_kappa},         {"n_th", p.n_th},
                       {"eta_over_kappa", p.eta_over_kappa}};
    root["truncation"] = {{"write_dims", c.truncation.write_dims},
                          {"readout_dims", c.truncation.readout_dims},
                          {"max_total_dim", c.truncation.max_total_dim}};
    root["write"] = {{"pulse", write_pulse(c.write.pulse)},
                     {"start_ns", c.write.start_ns},
                     {"end_ns", c.write.end_ns},
                     {"sample_step_ns", c.write.sample_step_ns}};
    const auto& r = c.readout;
    root["readout"] = {{"pulse", write_pulse(r.pulse)},
                       {"herald_time_ns", r.herald_time_ns},
                       {"first_center_offset_ns", r.first_center_offset_ns},
                       {"center_step_ns", r.center_step_ns},
                       {"center_count", r.center_count},
                       {"tau_cut_over_width", r.tau_cut_over_width},
                       {"init", r.init},
                       {"bell_phase_rad", r.bell_phase_rad},
                       {"trajectory_end_offset_ns", r.trajectory_end_offset_ns},
                       {"trajectory_sample_step_ns", r.trajectory_sample_step_ns}};
    root["integrator"] = {{"method", c.integrator.method},
                          {"rtol", c.integrator.rtol},
                          {"atol", c.integrator.atol},
                          {"fixed_step_ns", c.integrator.fixed_step_ns},
                          {"check_positivity", c.integrator.check_positivity}};
    root["sweep"] = {{"thermal_n_th", c.sweep.thermal_n_th},
                     {"dephasing_eta_over_kappa", c.sweep.dephasing_eta_over_kappa}};
    json modes = json::array();
    for (const auto& m : c.extra_modes)
        modes.push_back({{"omega_over_2pi_MHz", m.omega_over_2pi_MHz},
                         {"gamma_over_2pi_MHz", m.gamma_over_2pi_MHz},
                         {"g_over_2pi_kHz", m.g_over_2pi_kHz},
                         {"n_th", m.n_th}});
    root["extra_modes"] = modes;
    root["output_dir"] = c.output_dir;
    root["seed"] = c.seed;
    root["jobs"] = c.jobs;
    return root.dump(2) + "\n";
}

void RunConfig::validate() const {
    (void)params();
    write_space();
    readout_space();
    (void)write.pulse.to_pulse(1.0);
    (void)readout.pulse.to_pulse(1.0);
    if (!(write.sample_step_ns > 0.0) || !(write.end_ns > write.start_ns))
        throw ParameterError("write sampling window is empty");
    if (readout.center_count < 0) throw ParameterError("readout.center_count must be >= 0");
    if (!(readout.center_step_ns > 0.0)) throw ParameterError("readout.center_step_ns must be > 0");
    if (!(readout.tau_cut_over_width >= 0.0)) throw ParameterError("readout.tau_cut_over_width must be >= 0");
    if (readout.init != "bell" && readout.init != "separable" && readout.init != "heralded")
        throw ParameterError("readout.init must be bell, separable or heralded");
    if (!(readout.trajectory_sample_step_ns > 0.0)) throw ParameterError("trajectory sample step must be > 0");
    if (integrator.method != "dopri5" && integrator.method != "rk4")
        throw ParameterError("integrator.method must be dopri5 or rk4");
    if (!(integrator.rtol > 0.0) || !(integrator.atol > 0.0) || !(integrator.fixed_step_ns > 0.0))
        throw ParameterError("integrator tolerances and step must be > 0");
    for (double n : sweep.thermal_n_th)
        if (!(n >= 0.0)) throw ParameterError("thermal sweep values must be >= 0");
    for (double e : sweep.dephasing_eta_over_kappa)
        if (!(e >= 0.0)) throw ParameterError("dephasing sweep values must be >= 0");
    if (jobs == 0) throw ParameterError("jobs must be >= 1");
}

ModeSpace RunConfig::write_space() const {
    return build_mode_space(truncation.write_dims, static_cast<std::size_t>(std::max(0, truncation.max_total_dim)));
}

ModeSpace RunConfig::readout_space() const {
    return build_mode_space(truncation.readout_dims, static_cast<std::size_t>(std::max(0, truncation.max_total_dim)));
}

ProtocolSchedule RunConfig::schedule() const {
    const double kappa = params().kappa;
    ProtocolSchedule s;
    s.write = write.pulse.to_pulse(kappa);
    s.readout = readout.pulse.to_pulse(kappa);
    s.herald_time = readout.herald_time_ns;
    s.write_start = write.start_ns;
    s.write_end = write.end_ns;
    s.write_sample_step = write.sample_step_ns;
    s.tau_cut = readout.tau_cut_over_width * readout.pulse.width_ns;
    return s;
}

PropagationOptions RunConfig::propagation() const {
    PropagationOptions o;
    o.integrator.method = integrator.method == "rk4" ? StepMethod::RungeKutta4 : StepMethod::DormandPrince;
    o.integrator.rtol = integrator.rtol;
    o.integrator.atol = integrator.atol;
    o.integrator.fixed_step = integrator.fixed_step_ns;
    o.check_positivity = integrator.check_positivity;
    return o;
}

FringeSettings RunConfig::fringe_settings() const {
    FringeSettings f;
    f.readout_template = readout.pulse.to_pulse(params().kappa);
    f.centers = readout_grid(readout.herald_time_ns + readout.first_center_offset_ns, readout.center_step_ns,
                             static_cast<std::size_t>(readout.center_count));
    f.tau_cut = readout.tau_cut_over_width * readout.pulse.width_ns;
    f.jobs = jobs;
    return f;
}

}  // namespace ombell
