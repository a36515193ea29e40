#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ombell/analytic.hpp"
#include "ombell/integrator.hpp"
#include "ombell/liouville.hpp"
#include "ombell/protocol.hpp"

namespace ombell {

// Ordinary frequencies (f = omega / 2 pi); converted on use.
struct PhysicsConfig {
    double omega1_over_2pi_MHz = 700.0;
    double omega2_over_2pi_MHz = 980.0;
    double g1_over_2pi_kHz = 72.0;
    double g2_over_2pi_kHz = 84.0;
    double gamma1_over_2pi_MHz = 4.4;
    double gamma2_over_2pi_MHz = 5.4;
    double kappa_over_2pi_MHz = 200.0;
    double kappa_d_over_kappa = 0.1;
    double zeta_over_kappa = 0.1;
    double n_th = 0.0;
    double eta_over_kappa = 0.0;

    SystemParams to_params() const;
};

struct PulseConfig {
    double amplitude_over_kappa = 0.0;
    double center_ns = 0.0;
    double width_ns = 1.0;
    double detuning_over_2pi_MHz = 0.0;

    PulseSpec to_pulse(double kappa) const;
};

struct TruncationConfig {
    std::vector<int> write_dims{3, 3, 3, 3};
    std::vector<int> readout_dims{3, 3, 3, 3};
    int max_total_dim = 256;
};

struct WriteConfig {
    PulseConfig pulse{2.5, 50.0, 12.5, 840.0};
    double start_ns = 0.0;
    double end_ns = 300.0;
    double sample_step_ns = 0.5;
};

struct ReadoutConfig {
    PulseConfig pulse{150.0, 153.0, 17.5, -840.0};  // centre used by readout-run
    double herald_time_ns = 83.0;                   // readout start; nominal t_P
    double first_center_offset_ns = 70.0;           // first fringe centre after t_P
    double center_step_ns = 0.5;
    int center_count = 16;
    double tau_cut_over_width = 3.0;
    std::string init = "bell";  // bell | separable | heralded
    double bell_phase_rad = 0.0;
    double trajectory_end_offset_ns = 105.0;  // readout-run: stop this long after the centre
    double trajectory_sample_step_ns = 0.5;
};

struct IntegratorConfig {
    std::string method = "dopri5";  // dopri5 | rk4
    double rtol = 1e-8;
    double atol = 1e-16;
    double fixed_step_ns = 5e-3;
    bool check_positivity = false;
};

struct SweepConfig {
    std::vector<double> thermal_n_th{0.0, 0.02, 0.05, 0.1};
    std::vector<double> dephasing_eta_over_kappa{1e-9, 1e-8, 1e-7, 1e-6, 1e-5};
};

struct ExtraModeConfig {
    double omega_over_2pi_MHz = 0.0;
    double gamma_over_2pi_MHz = 0.0;
    double g_over_2pi_kHz = 0.0;
    double n_th = 0.0;

    ExtraMode to_mode() const;
};

struct RunConfig {
    PhysicsConfig physics;
    TruncationConfig truncation;
    WriteConfig write;
    ReadoutConfig readout;
    IntegratorConfig integrator;
    SweepConfig sweep;
    std::vector<ExtraModeConfig> extra_modes;
    std::string output_dir = "out";
    std::uint64_t seed = 20140101;
    unsigned jobs = 1;

    void validate() const;

    SystemParams params() const { return physics.to_params(); }
    ModeSpace write_space() const;
    ModeSpace readout_space() const;
    ProtocolSchedule schedule() const;
    PropagationOptions propagation() const;
    FringeSettings fringe_settings() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace ombell
