#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ombell/mode_space.hpp"
#include "ombell/types.hpp"

namespace ombell {

// Reduced state on the kept modes (listed in any order, reported in mode order).
Mat partial_trace(const Mat& rho, const ModeSpace& space, std::vector<Mode> keep);

struct TwoQubitState {
    Eigen::Matrix4cd rho;  // basis |00>,|01>,|10>,|11> (mech1, mech2)
    double retained_probability = 1.0;
};

// rho_m over mech1 (x) mech2 with truncations dim1, dim2.
TwoQubitState two_qubit_restrict(const Mat& rho_m, int dim1, int dim2, double floor = 1e-12);

// Wootters concurrence. The lambda_i come from the singular values of
// V^T (sy x sy) V with rho = V V^dag, which avoids square roots of round-off
// sized eigenvalues that the textbook route suffers from.
double concurrence(const TwoQubitState& q);

// Textbook route: square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
// Kept as an independent oracle.
double concurrence_eigen_route(const Eigen::Matrix4cd& rho);

struct Moment {
    cplx value{};
    bool truncation_warning = false;
};

// <(o^dag)^k o^l> for o = amplitude + (fluctuation operator of `mode`).
Moment displaced_normal_moment(const Mat& rho_fluct, const ModeSpace& space, cplx amplitude, Mode mode, int k,
                               int l);

struct G2 {
    double value = 0.0;
    bool defined = false;
    double intensity = 0.0;
};

inline constexpr double kG2IntensityFloor = 1e-14;

G2 g2_zero_delay(const Mat& rho_fluct, const ModeSpace& space, cplx amplitude, Mode mode);

struct VisibilityFit {
    double visibility = 0.0;
    double mean = 0.0;       // I0
    double phase = 0.0;      // phi0
    double omega = 0.0;      // fixed beat frequency used
    double residual = 0.0;   // rms residual relative to I0
    double extrema_visibility = 0.0;
    bool confident = false;
};

// Linear least squares of I0[1 + V cos(omega t + phi0)] at fixed omega.
VisibilityFit visibility(std::span<const double> t, std::span<const double> intensity, double omega);

struct FrequencyFit {
    double omega = 0.0;
    double residual = 0.0;
};

// Scans omega over [lo, hi] then refines by golden section on the fit residual.
FrequencyFit free_frequency_fit(std::span<const double> t, std::span<const double> intensity, double lo, double hi);

}  // namespace ombell
