#pragma once

#include <span>

#include "ombell/types.hpp"

namespace ombell {

// a|00> + b|01> + c|10> + d|11> written by the Stokes pulse (mech1, mech2).
struct PureWriteState {
    cplx c00{}, c01{}, c10{}, c11{};

    double norm_squared() const;
    void validate() const;  // normalisation within 1e-12

    static PureWriteState bell(double phase);
    static PureWriteState separable(double phase);
    Eigen::Vector4cd vector() const { return {c00, c01, c10, c11}; }
};

double analytic_intensity(const PureWriteState& s);
double analytic_concurrence(const PureWriteState& s);

// Requires |c01| == |c10|; DomainError otherwise.
double analytic_visibility(const PureWriteState& s);

// V = C / (2 - C), valid when c00 = 0.
double visibility_from_concurrence(double concurrence);

struct ExtraMode {
    double omega = 0.0;  // rad/ns
    double gamma = 0.0;  // rad/ns
    double g = 0.0;      // rad/ns
    double n_th = 0.0;
};

// eta = sum_j (n_j + 1) gamma_j g_j^2 / Omega_j^2
double dephasing_rate_estimate(std::span<const ExtraMode> modes);

// Single-mode estimate quoted alongside it: (g/Omega)^2 (2n + 1) gamma.
double dephasing_rate_estimate_symmetric(const ExtraMode& mode);

}  // namespace ombell
