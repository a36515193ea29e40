#include "ombell/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "ombell/errors.hpp"

namespace ombell {

double PureWriteState::norm_squared() const {
    return std::norm(c00) + std::norm(c01) + std::norm(c10) + std::norm(c11);
}

void PureWriteState::validate() const {
    if (std::abs(norm_squared() - 1.0) > 1e-12) throw DomainError("pure write state is not normalised");
}

PureWriteState PureWriteState::bell(double phase) {
    const double s = 1.0 / std::sqrt(2.0);
    return {0.0, s * std::exp(cplx(0.0, phase)), s, 0.0};
}

PureWriteState PureWriteState::separable(double phase) {
    return {0.5, 0.5 * std::exp(cplx(0.0, phase)), 0.5, 0.5 * std::exp(cplx(0.0, phase))};
}

double analytic_intensity(const PureWriteState& s) {
    s.validate();
    return std::norm(s.c10 + s.c01) + 2.0 * std::norm(s.c11);
}

double analytic_concurrence(const PureWriteState& s) {
    s.validate();
    return std::clamp(2.0 * std::abs(s.c10 * s.c01 - s.c00 * s.c11), 0.0, 1.0);
}

double analytic_visibility(const PureWriteState& s) {
    s.validate();
    const double w10 = std::norm(s.c10);
    if (std::abs(std::abs(s.c01) - std::abs(s.c10)) > 1e-12)
        throw DomainError("closed-form visibility needs |c01| == |c10|");
    const double denom = w10 + std::norm(s.c11);
    if (denom == 0.0) throw DomainError("visibility undefined without |10> or |11> weight");
    const double v = w10 / denom;
    if (std::abs(s.c00) < 1e-12) {
        const double c = analytic_concurrence(s);
        if (std::abs(v - c / (2.0 - c)) > 1e-12) throw IntegrityError("V = C/(2-C) violated for c00 = 0");
    }
    return v;
}

double visibility_from_concurrence(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("concurrence must lie in [0,1]");
    return c / (2.0 - c);
}

double dephasing_rate_estimate(std::span<const ExtraMode> modes) {
    if (modes.empty()) throw DomainError("need at least one extra mode");
    double eta = 0.0;
    for (const ExtraMode& m : modes) {
        if (!(m.omega > 0.0) || m.gamma < 0.0 || m.n_th < 0.0) throw DomainError("extra mode needs omega > 0");
        eta += (m.n_th + 1.0) * m.gamma * (m.g / m.omega) * (m.g / m.omega);
    }
    return eta;
}

double dephasing_rate_estimate_symmetric(const ExtraMode& m) {
    if (!(m.omega > 0.0)) throw DomainError("extra mode needs omega > 0");
    return (m.g / m.omega) * (m.g / m.omega) * (2.0 * m.n_th + 1.0) * m.gamma;
}

}  // namespace ombell
