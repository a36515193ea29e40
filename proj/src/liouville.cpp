#include "ombell/liouville.hpp"

#include <sstream>

#include "ombell/errors.hpp"

namespace ombell {

namespace {

SpMat hamiltonian_static(const ModeSpace& space, const SystemParams& p) {
    const SpMat& na = space.number(Mode::Cavity);
    SpMat h = p.omega1 * space.number(Mode::Mech1) + p.omega2 * space.number(Mode::Mech2);
    const SpMat x1 = space.annihilation(Mode::Mech1) + space.creation(Mode::Mech1);
    const SpMat x2 = space.annihilation(Mode::Mech2) + space.creation(Mode::Mech2);
    h -= p.g1 * SpMat(na * x1);
    h -= p.g2 * SpMat(na * x2);
    return h;
}

}  // namespace

Dissipation::Dissipation(const ModeSpace& space, const SystemParams& p, bool bare_cavity_dephasing)
    : cavity_(space.annihilation(Mode::Cavity)),
      detector_adj_(space.creation(Mode::Detector)),
      zeta_(p.zeta) {
    p.validate();
    auto add = [&](double rate, const SpMat& op) {
        if (rate > 0.0) jumps_.push_back({rate, op, SpMat(op.adjoint())});
    };
    add(p.kappa, space.annihilation(Mode::Cavity));
    add(p.kappa_d, space.annihilation(Mode::Detector));
    add((p.n_th + 1.0) * p.gamma1, space.annihilation(Mode::Mech1));
    add((p.n_th + 1.0) * p.gamma2, space.annihilation(Mode::Mech2));
    add(p.n_th * p.gamma1, space.creation(Mode::Mech1));
    add(p.n_th * p.gamma2, space.creation(Mode::Mech2));
    if (bare_cavity_dephasing) add(p.eta, space.number(Mode::Cavity));

    drift_ = SpMat(space.total_dim(), space.total_dim());
    for (const Jump& j : jumps_) drift_ -= (0.5 * j.rate) * SpMat(j.op_adj * j.op);
    if (zeta_ > 0.0) drift_ -= (0.5 * zeta_) * SpMat(detector_adj_ * cavity_);
    drift_.makeCompressed();
}

void Dissipation::add_sandwich_terms(const Mat& rho, Mat& Y, Mat& scratch) const {
    for (const Jump& j : jumps_) {
        scratch.noalias() = j.op * rho;
        Y.noalias() += (0.5 * j.rate) * (scratch * j.op_adj);
    }
    if (zeta_ > 0.0) {
        scratch.noalias() = cavity_ * rho;
        Y.noalias() += (0.5 * zeta_) * (scratch * detector_adj_);
    }
}

OperatorMatrix assemble_hamiltonian(const ModeSpace& space, const SystemParams& p, std::span<const PulseSpec> pulses,
                                    double t, const Amplitudes* classical) {
    SpMat h = hamiltonian_static(space, p);
    const SpMat& a = space.annihilation(Mode::Cavity);
    const SpMat& ad = space.creation(Mode::Cavity);
    if (classical == nullptr) {
        cplx f{};
        for (const PulseSpec& pulse : pulses) f += drive_envelope(pulse, t);
        if (f != cplx{}) h += f * ad + std::conj(f) * a;
    } else {
        const Amplitudes& c = *classical;
        const SpMat x1 = space.annihilation(Mode::Mech1) + space.creation(Mode::Mech1);
        const SpMat x2 = space.annihilation(Mode::Mech2) + space.creation(Mode::Mech2);
        h -= 2.0 * (p.g1 * c.mech1.real() + p.g2 * c.mech2.real()) * space.number(Mode::Cavity);
        const SpMat field = std::conj(c.cavity) * a + c.cavity * ad;
        h -= p.g1 * SpMat(field * x1) + p.g2 * SpMat(field * x2);
    }
    return OperatorMatrix(std::move(h), true);
}

Mat lindblad_rhs(const ModeSpace& space, const SystemParams& p, const Mat& rho, const OperatorMatrix& H) {
    const Dissipation diss(space, p, true);
    const SpMat m = SpMat(-I * H.sparse()) + diss.drift();
    Mat y = m * rho;
    Mat scratch(rho.rows(), rho.cols());
    diss.add_sandwich_terms(rho, y, scratch);
    return y + y.adjoint();
}

void enforce_invariants(const Mat& rho, double reference_trace, const PropagationOptions& opt, double t) {
    const StateDiagnostics d = diagnose(rho, opt.check_positivity);
    const double drift = std::abs(rho.trace() - cplx(reference_trace));
    std::ostringstream os;
    if (drift > opt.trace_tolerance) os << "trace drift " << drift;
    else if (d.hermiticity_error > opt.hermiticity_tolerance) os << "Hermiticity defect " << d.hermiticity_error;
    else if (opt.check_positivity && d.min_eigenvalue < -opt.positivity_tolerance)
        os << "negative eigenvalue " << d.min_eigenvalue;
    else return;
    os << " at t=" << t << " ns";
    throw IntegrityError(os.str());
}

IntegrationStats propagate(const ModeSpace& space, const SystemParams& params, std::span<const PulseSpec> pulses,
                           const QuantumState& initial, std::span<const double> sample_times,
                           const StateObserver& observer, const PropagationOptions& options) {
    for (const PulseSpec& pulse : pulses) pulse.validate();
    const auto n = space.total_dim();
    if (initial.rho.rows() != n || initial.rho.cols() != n) throw DomainError("state does not match mode space");

    const Dissipation diss(space, params, true);
    const SpMat drift = SpMat(-I * hamiltonian_static(space, params)) + diss.drift();
    const SpMat& a = space.annihilation(Mode::Cavity);
    const SpMat& ad = space.creation(Mode::Cavity);
    const std::vector<PulseSpec> drive(pulses.begin(), pulses.end());

    Mat Y(n, n), scratch(n, n);
    auto rhs = [&](double t, const Vec& yv, Vec& dy) {
        Eigen::Map<const Mat> rho(yv.data(), n, n);
        Eigen::Map<Mat> out(dy.data(), n, n);
        Y.noalias() = drift * rho;
        cplx f{};
        for (const PulseSpec& pulse : drive) f += drive_envelope(pulse, t);
        if (f != cplx{}) {
            scratch.noalias() = ad * rho;
            Y.noalias() += (-I * f) * scratch;
            scratch.noalias() = a * rho;
            Y.noalias() += (-I * std::conj(f)) * scratch;
        }
        diss.add_sandwich_terms(rho, Y, scratch);
        out = Y + Y.adjoint();
    };

    const double ref_trace = initial.rho.trace().real();
    Vec y = Eigen::Map<const Vec>(initial.rho.data(), n * n);
    auto on_sample = [&](double t, const Vec& yv) {
        QuantumState s{Eigen::Map<const Mat>(yv.data(), n, n), t};
        enforce_invariants(s.rho, ref_trace, options, t);
        if (observer) observer(s);
    };
    return integrate(rhs, y, initial.time, sample_times, on_sample, options.integrator);
}

std::vector<QuantumState> propagate_all(const ModeSpace& space, const SystemParams& params,
                                        std::span<const PulseSpec> pulses, const QuantumState& initial,
                                        std::span<const double> sample_times, const PropagationOptions& options) {
    std::vector<QuantumState> out;
    out.reserve(sample_times.size());
    propagate(space, params, pulses, initial, sample_times, [&](const QuantumState& s) { out.push_back(s); },
              options);
    return out;
}

}  // namespace ombell
