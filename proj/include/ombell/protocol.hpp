#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ombell/liouville.hpp"
#include "ombell/observables.hpp"

namespace ombell {

struct ProtocolSchedule {
    PulseSpec write = PulseSpec::reference_write();
    PulseSpec readout = PulseSpec::reference_readout(83.0 + 4.0 * 17.5);
    double herald_time = 83.0;        // nominal t_P, also the readout start
    double write_start = 0.0;
    double write_end = 300.0;
    double write_sample_step = 0.5;
    double tau_cut = 3.0 * 17.5;      // fringe cut offset after the readout centre

    void validate() const;
    std::vector<double> write_samples() const;
};

using ModeOccupations = std::array<double, kModeCount>;

struct WriteTrajectory {
    std::vector<double> times;
    std::vector<ModeOccupations> occupations;
    // Detector-|1> diagonal block of rho(t) over cavity (x) mech1 (x) mech2. That block
    // is all heralding needs and it is d_det^2 times smaller than rho.
    std::vector<Mat> herald_blocks;
    QuantumState final_state;
    IntegrationStats stats;
};

WriteTrajectory run_write(const ModeSpace& space, const SystemParams& params, const ProtocolSchedule& schedule,
                          const QuantumState& initial, const PropagationOptions& options = {});

inline constexpr double kHeraldFloor = 1e-12;

double herald_probability(const Mat& rho, const ModeSpace& space);

// P1 rho P1 / Tr(P1 rho) with P1 = |1_d><1_d| on the detector; NoClickError below floor.
QuantumState herald_project(const QuantumState& state, const ModeSpace& space, double floor = kHeraldFloor);

// Mechanical state conditioned on one detector photon, from a herald block.
Mat conditional_mechanical_state(const Mat& herald_block, const ModeSpace& space);

struct HeraldPoint {
    double time = 0.0;
    double herald_probability = 0.0;
    double cavity_occupation = 0.0;          // unconditional n_c at that time
    std::optional<double> concurrence;       // absent: no click or degenerate block
    double retained_probability = 0.0;
    Mat mechanical_state;                    // empty when absent
};

std::vector<HeraldPoint> herald_scan(const WriteTrajectory& trajectory, const ModeSpace& space,
                                     double floor = kHeraldFloor);

// Index of the concurrence maximum; when no point carries entanglement, the point
// closest to fallback_time. nullopt when no point clicked at all.
std::optional<std::size_t> best_herald_index(const std::vector<HeraldPoint>& scan, double fallback_time);

// Pads or truncates a two-mode mechanical state between truncations.
Mat adapt_mechanical_state(const Mat& rho_m, int from1, int from2, int to1, int to2);

// Two-mode pure state a|00> + b|01> + c|10> + d|11> as a density matrix on the truncation.
Mat mechanical_pure_state(const Eigen::Vector4cd& coefficients, int dim1, int dim2);

SemiclassicalState prepare_readout_initial(const Mat& rho_m, const ModeSpace& fluct_space, double time);

struct ReadoutSample {
    double time = 0.0;
    Amplitudes classical;
    ModeOccupations fluctuation{};
    G2 g2_detector;
    G2 g2_cavity;

    double classical_occupation(Mode m) const { return std::norm(classical[m]); }
    double total_occupation(Mode m) const {
        return classical_occupation(m) + fluctuation[static_cast<std::size_t>(m)];
    }
};

struct ReadoutTrajectory {
    std::vector<ReadoutSample> samples;
    SemiclassicalState final_state;
    IntegrationStats stats;
};

// Classical amplitudes co-integrated with the fluctuation master equation in the
// displaced frame.
ReadoutTrajectory run_readout(const ModeSpace& fluct_space, const SystemParams& params,
                              const SemiclassicalState& init, const PulseSpec& readout,
                              std::span<const double> sample_times, const PropagationOptions& options = {});

struct FringePoint {
    double readout_center = 0.0;
    ReadoutSample cut;  // sampled at readout_center + tau_cut
};

struct FringeScan {
    std::vector<FringePoint> points;
    std::optional<VisibilityFit> detector;
    std::optional<VisibilityFit> cavity;
    std::optional<VisibilityFit> detector_fluctuation;
    std::optional<FrequencyFit> detector_frequency;
    std::string fit_error;  // set when a fit could not be produced

    std::vector<double> centers() const;
    std::vector<double> detector_intensity() const;
    std::vector<double> cavity_intensity() const;
};

struct FringeSettings {
    PulseSpec readout_template = PulseSpec::reference_readout(0.0);
    std::vector<double> centers;
    double tau_cut = 3.0 * 17.5;
    unsigned jobs = 1;
};

FringeScan fringe_scan(const ModeSpace& fluct_space, const SystemParams& params, const SemiclassicalState& init,
                       const FringeSettings& settings, const PropagationOptions& options = {});

// Evenly spaced readout centres.
std::vector<double> readout_grid(double first, double step, std::size_t count);

}  // namespace ombell
