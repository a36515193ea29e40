#pragma once

#include <array>

#include "ombell/mode_space.hpp"
#include "ombell/types.hpp"

namespace ombell {

struct QuantumState {
    Mat rho;
    double time = 0.0;
};

// Classical parts of the four fields during readout.
struct Amplitudes {
    cplx cavity{};
    cplx mech1{};
    cplx mech2{};
    cplx detector{};

    cplx& operator[](Mode m);
    cplx operator[](Mode m) const;
};

struct SemiclassicalState {
    Amplitudes classical;
    Mat rho_fluct;
    double time = 0.0;
};

struct StateDiagnostics {
    double trace_error = 0.0;        // |Tr rho - 1|
    double hermiticity_error = 0.0;  // max |rho - rho^dagger|
    double min_eigenvalue = 0.0;     // only filled when requested
};

StateDiagnostics diagnose(const Mat& rho, bool with_spectrum);

QuantumState vacuum_state(const ModeSpace& space);

// Cavity and detector in vacuum, each mechanical mode in a truncated geometric
// distribution with the given mean.
QuantumState thermal_state(const ModeSpace& space, double n_mech1, double n_mech2);

// |0_c><0_c| (x) rho_m (x) |0_d><0_d|, rho_m over the two mechanical modes.
Mat embed_mechanical(const ModeSpace& space, const Mat& rho_m);

// Truncated geometric populations, renormalised.
Eigen::VectorXd thermal_populations(double mean, int levels);

double expectation_real(const SpMat& op, const Mat& rho);
cplx expectation(const SpMat& op, const Mat& rho);

std::array<double, kModeCount> occupations(const ModeSpace& space, const Mat& rho);

}  // namespace ombell
