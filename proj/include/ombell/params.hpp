#pragma once

#include <numbers>

#include "ombell/types.hpp"

namespace ombell {

// Internal units: angular frequencies in rad/ns, times in ns.
namespace units {
inline constexpr double kRadPerNsPerMHz = 2.0 * std::numbers::pi * 1e-3;
constexpr double from_MHz(double f_over_2pi) { return f_over_2pi * kRadPerNsPerMHz; }
constexpr double from_kHz(double f_over_2pi) { return f_over_2pi * kRadPerNsPerMHz * 1e-3; }
constexpr double to_MHz(double omega) { return omega / kRadPerNsPerMHz; }
constexpr double to_kHz(double omega) { return omega / kRadPerNsPerMHz * 1e3; }
}  // namespace units

struct SystemParams {
    double omega1 = 0.0;   // mechanical frequencies
    double omega2 = 0.0;
    double g1 = 0.0;       // single-photon couplings
    double g2 = 0.0;
    double kappa = 0.0;    // cavity decay
    double kappa_d = 0.0;  // detector (filter) decay
    double zeta = 0.0;     // cavity -> detector feed
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double n_th = 0.0;     // mechanical bath occupation
    double eta = 0.0;      // cavity pure dephasing

    // Throws ParameterError: negative rates, ordering of mechanical frequencies,
    // and the complete-positivity bound zeta^2 <= kappa*kappa_d.
    void validate() const;

    static SystemParams reference_defaults();
};

struct PulseSpec {
    double amplitude = 0.0;  // rad/ns
    double center = 0.0;     // ns
    double width = 1.0;      // ns, Gaussian 1/e half width of the field
    double detuning = 0.0;   // carrier minus cavity frequency, rad/ns

    void validate() const;

    static PulseSpec reference_write();
    static PulseSpec reference_readout(double center);
};

// A exp(-(t-t0)^2/sigma^2) exp(-i Delta t) in the cavity rotating frame.
cplx drive_envelope(const PulseSpec& pulse, double t);

}  // namespace ombell
