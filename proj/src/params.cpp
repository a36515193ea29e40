#include "ombell/params.hpp"

#include <cmath>
#include <string>

#include "ombell/errors.hpp"

namespace ombell {

void SystemParams::validate() const {
    const double rates[] = {kappa, kappa_d, zeta, gamma1, gamma2, n_th, eta};
    for (double r : rates)
        if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("rates and occupations must be finite and >= 0");
    // The sign of a coupling is a gauge choice (b -> -b), so only finiteness matters.
    if (!std::isfinite(g1) || !std::isfinite(g2)) throw ParameterError("couplings must be finite");
    if (!(omega1 > 0.0) || !(omega2 > omega1) || !std::isfinite(omega2))
        throw ParameterError("need 0 < omega1 < omega2");
    // Small slack so that zeta == sqrt(kappa*kappa_d) survives round-off.
    if (zeta * zeta > kappa * kappa_d * (1.0 + 1e-12))
        throw ParameterError("cascade rate violates complete positivity: zeta^2 > kappa*kappa_d");
}

SystemParams SystemParams::reference_defaults() {
    SystemParams p;
    p.omega1 = units::from_MHz(700.0);
    p.omega2 = units::from_MHz(980.0);
    p.g1 = units::from_kHz(72.0);
    p.g2 = units::from_kHz(84.0);
    p.gamma1 = units::from_MHz(4.4);
    p.gamma2 = units::from_MHz(5.4);
    p.kappa = units::from_MHz(200.0);
    p.kappa_d = 0.1 * p.kappa;
    p.zeta = 0.1 * p.kappa;
    return p;
}

void PulseSpec::validate() const {
    if (!(width > 0.0) || !std::isfinite(width)) throw ParameterError("pulse width must be > 0");
    if (!std::isfinite(amplitude) || !std::isfinite(center) || !std::isfinite(detuning))
        throw ParameterError("pulse fields must be finite");
}

PulseSpec PulseSpec::reference_write() {
    const SystemParams p = SystemParams::reference_defaults();
    return {2.5 * p.kappa, 50.0, 12.5, 0.5 * (p.omega1 + p.omega2)};
}

PulseSpec PulseSpec::reference_readout(double center) {
    const SystemParams p = SystemParams::reference_defaults();
    return {150.0 * p.kappa, center, 17.5, -0.5 * (p.omega1 + p.omega2)};
}

cplx drive_envelope(const PulseSpec& pulse, double t) {
    const double x = (t - pulse.center) / pulse.width;
    return pulse.amplitude * std::exp(-x * x) * std::exp(cplx(0.0, -pulse.detuning * t));
}

}  // namespace ombell
