#include "ombell/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ombell/errors.hpp"
#include "ombell/parallel.hpp"

namespace ombell {

void ProtocolSchedule::validate() const {
    write.validate();
    readout.validate();
    if (!(write_sample_step > 0.0)) throw ParameterError("write sample step must be > 0");
    if (!(write_end > write_start)) throw ParameterError("write window is empty");
    if (!(herald_time > write.center)) throw ParameterError("herald time must follow the write pulse centre");
    if (!(readout.center > herald_time)) throw ParameterError("readout pulse must follow the herald time");
    if (!(tau_cut >= 0.0)) throw ParameterError("fringe cut offset must be >= 0");
}

std::vector<double> ProtocolSchedule::write_samples() const {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor((write_end - write_start) / write_sample_step + 1e-9));
    t.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t.push_back(write_start + static_cast<double>(k) * write_sample_step);
    return t;
}

namespace {

std::vector<Eigen::Index> detector_level_indices(const ModeSpace& space, int level) {
    std::vector<Eigen::Index> idx;
    for (int c = 0; c < space.dim(Mode::Cavity); ++c)
        for (int m1 = 0; m1 < space.dim(Mode::Mech1); ++m1)
            for (int m2 = 0; m2 < space.dim(Mode::Mech2); ++m2) idx.push_back(space.index_of({c, m1, m2, level}));
    return idx;
}

Mat herald_block(const Mat& rho, const std::vector<Eigen::Index>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Mat b(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) b(i, j) = rho(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return b;
}

}  // namespace

WriteTrajectory run_write(const ModeSpace& space, const SystemParams& params, const ProtocolSchedule& schedule,
                          const QuantumState& initial, const PropagationOptions& options) {
    schedule.write.validate();
    if (!(schedule.write_sample_step > 0.0) || !(schedule.write_end > schedule.write_start))
        throw ParameterError("write sampling window is empty");
    const auto idx = detector_level_indices(space, 1);
    WriteTrajectory traj;
    QuantumState start = initial;
    start.time = schedule.write_start;
    const std::vector<double> samples = schedule.write_samples();
    traj.times.reserve(samples.size());
    traj.occupations.reserve(samples.size());
    traj.herald_blocks.reserve(samples.size());
    const PulseSpec pulses[] = {schedule.write};
    traj.stats = propagate(
        space, params, pulses, start, samples,
        [&](const QuantumState& s) {
            traj.times.push_back(s.time);
            traj.occupations.push_back(occupations(space, s.rho));
            traj.herald_blocks.push_back(herald_block(s.rho, idx));
            traj.final_state = s;
        },
        options);
    return traj;
}

double herald_probability(const Mat& rho, const ModeSpace& space) {
    return expectation_real(space.projector(Mode::Detector, 1).sparse(), rho);
}

QuantumState herald_project(const QuantumState& state, const ModeSpace& space, double floor) {
    const OperatorMatrix proj = space.projector(Mode::Detector, 1);
    const SpMat& p = proj.sparse();
    Mat projected = p * state.rho * p;
    const double prob = projected.trace().real();
    if (!(prob > floor)) throw NoClickError("herald probability below floor: no click");
    projected /= prob;
    return {0.5 * (projected + projected.adjoint()), state.time};
}

Mat conditional_mechanical_state(const Mat& block, const ModeSpace& space) {
    const int dc = space.dim(Mode::Cavity);
    const int dm = space.dim(Mode::Mech1) * space.dim(Mode::Mech2);
    if (block.rows() != dc * dm) throw DomainError("herald block does not match the mode space");
    Mat rm = Mat::Zero(dm, dm);
    for (int c = 0; c < dc; ++c) rm += block.block(c * dm, c * dm, dm, dm);
    const double tr = rm.trace().real();
    if (!(tr > 0.0)) throw NoClickError("empty herald block");
    rm /= tr;
    return 0.5 * (rm + rm.adjoint());
}

std::vector<HeraldPoint> herald_scan(const WriteTrajectory& traj, const ModeSpace& space, double floor) {
    std::vector<HeraldPoint> out;
    out.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        HeraldPoint pt;
        pt.time = traj.times[k];
        pt.cavity_occupation = traj.occupations[k][0];
        const Mat& block = traj.herald_blocks[k];
        pt.herald_probability = block.trace().real();
        if (pt.herald_probability > floor) {
            try {
                pt.mechanical_state = conditional_mechanical_state(block, space);
                const TwoQubitState q =
                    two_qubit_restrict(pt.mechanical_state, space.dim(Mode::Mech1), space.dim(Mode::Mech2));
                pt.retained_probability = q.retained_probability;
                pt.concurrence = concurrence(q);
            } catch (const NoClickError&) {
            } catch (const DegenerateStateError&) {
            }
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::optional<std::size_t> best_herald_index(const std::vector<HeraldPoint>& scan, double fallback_time) {
    std::optional<std::size_t> best;
    double best_c = 0.0;
    for (std::size_t k = 0; k < scan.size(); ++k)
        if (scan[k].concurrence && *scan[k].concurrence > best_c) {
            best_c = *scan[k].concurrence;
            best = k;
        }
    if (best) return best;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scan.size(); ++k)
        if (scan[k].mechanical_state.size() != 0 && std::abs(scan[k].time - fallback_time) < gap) {
            gap = std::abs(scan[k].time - fallback_time);
            best = k;
        }
    return best;
}

Mat adapt_mechanical_state(const Mat& rho_m, int from1, int from2, int to1, int to2) {
    if (rho_m.rows() != from1 * from2 || rho_m.cols() != from1 * from2)
        throw DomainError("mechanical state shape does not match its truncation");
    Mat out = Mat::Zero(to1 * to2, to1 * to2);
    for (int i1 = 0; i1 < std::min(from1, to1); ++i1)
        for (int i2 = 0; i2 < std::min(from2, to2); ++i2)
            for (int j1 = 0; j1 < std::min(from1, to1); ++j1)
                for (int j2 = 0; j2 < std::min(from2, to2); ++j2)
                    out(i1 * to2 + i2, j1 * to2 + j2) = rho_m(i1 * from2 + i2, j1 * from2 + j2);
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw DegenerateStateError("mechanical state lost all weight on truncation");
    return out / tr;
}

Mat mechanical_pure_state(const Eigen::Vector4cd& c, int dim1, int dim2) {
    if (dim1 < 2 || dim2 < 2) throw DomainError("mechanical truncation must keep one phonon");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim1 * dim2);
    psi(0) = c(0);
    psi(1) = c(1);
    psi(dim2) = c(2);
    psi(dim2 + 1) = c(3);
    const double norm = psi.squaredNorm();
    if (!(norm > 0.0)) throw DomainError("zero state vector");
    return psi * psi.adjoint() / norm;
}

SemiclassicalState prepare_readout_initial(const Mat& rho_m, const ModeSpace& space, double time) {
    return {Amplitudes{}, embed_mechanical(space, rho_m), time};
}

namespace {

constexpr double kTrackStep = 2e-3;  // ns between stored classical samples

// The mean-field amplitudes do not depend on the fluctuations, so they are integrated
// once, tightly, and read back by cubic Hermite interpolation.
class ClassicalTrack {
public:
    ClassicalTrack(const SystemParams& p, const PulseSpec& pulse, const Amplitudes& init, double t0, double t1)
        : p_(p), pulse_(pulse), t0_(t0) {
        const auto count = static_cast<std::size_t>(std::ceil((t1 - t0) / kTrackStep)) + 2;
        std::vector<double> grid(count);
        for (std::size_t k = 0; k < count; ++k) grid[k] = t0 + static_cast<double>(k) * kTrackStep;
        Vec y(4);
        y << init.cavity, init.mech1, init.mech2, init.detector;
        values_.reserve(count);
        slopes_.reserve(count);
        IntegratorOptions tight;
        tight.rtol = 1e-12;
        tight.atol = 1e-18;
        auto rhs = [this](double t, const Vec& v, Vec& dv) { dv = derivative(t, v); };
        integrate(rhs, y, t0, grid,
                  [this](double t, const Vec& v) {
                      values_.push_back(v);
                      slopes_.push_back(derivative(t, v));
                  },
                  tight);
    }

    Amplitudes at(double t) const {
        const double u = (t - t0_) / kTrackStep;
        auto k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(values_.size() - 2)));
        const double s = u - static_cast<double>(k);
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        const Vec v = h00 * values_[k] + (h10 * kTrackStep) * slopes_[k] + h01 * values_[k + 1] +
                      (h11 * kTrackStep) * slopes_[k + 1];
        return {v[0], v[1], v[2], v[3]};
    }

private:
    Vec derivative(double t, const Vec& y) const {
        const cplx alpha = y[0], beta1 = y[1], beta2 = y[2], delta = y[3];
        const double shift = p_.g1 * beta1.real() + p_.g2 * beta2.real();
        Vec d(4);
        d[0] = -(0.5 * (p_.kappa + p_.eta)) * alpha + 2.0 * I * shift * alpha - I * drive_envelope(pulse_, t);
        d[1] = -(I * p_.omega1 + 0.5 * p_.gamma1) * beta1 + I * p_.g1 * std::norm(alpha);
        d[2] = -(I * p_.omega2 + 0.5 * p_.gamma2) * beta2 + I * p_.g2 * std::norm(alpha);
        d[3] = -(0.5 * p_.kappa_d) * delta - (0.5 * p_.zeta) * alpha;
        return d;
    }

    SystemParams p_;
    PulseSpec pulse_;
    double t0_;
    std::vector<Vec> values_, slopes_;
};

// Fluctuation master equation in the interaction picture of the free mechanical
// oscillators. Their fast rotation moves into phases on the (weak) coupling terms,
// which lets the step size follow the slow dynamics. Mechanical damping is phase
// covariant, so the dissipator is unchanged.
class ReadoutGenerator {
public:
    ReadoutGenerator(const ModeSpace& space, const SystemParams& p, const ClassicalTrack& track, double t0)
        : p_(p), track_(track), t0_(t0), n_(space.total_dim()), diss_(space, p, false), Y_(n_, n_),
          scratch_(n_, n_) {
        number_ = space.number(Mode::Cavity);
        a_ = space.annihilation(Mode::Cavity);
        ad_ = space.creation(Mode::Cavity);
        for (int j = 0; j < 2; ++j) {
            const Mode m = j == 0 ? Mode::Mech1 : Mode::Mech2;
            const SpMat& b = space.annihilation(m);
            n_b_[j] = number_ * b;
            a_b_[j] = a_ * b;
            ad_b_[j] = ad_ * b;
        }
    }

    void operator()(double t, const Vec& y, Vec& dy) {
        const Amplitudes c = track_.at(t);
        const double shift = p_.g1 * c.mech1.real() + p_.g2 * c.mech2.real();
        const double g[2] = {p_.g1, p_.g2};
        const double omega[2] = {p_.omega1, p_.omega2};
        // H = -sum_j g_j [e_j (n b_j + alpha* a b_j + alpha a^dag b_j) + h.c.] - 2 shift n
        SpMat k = (-2.0 * shift) * number_;
        for (int j = 0; j < 2; ++j) {
            const cplx e = g[j] * std::exp(cplx(0.0, -omega[j] * (t - t0_)));
            const SpMat lower = e * n_b_[j] + (e * std::conj(c.cavity)) * a_b_[j] + (e * c.cavity) * ad_b_[j];
            k -= lower;
            k -= SpMat(lower.adjoint());
        }
        // generator part acting from the left: -iH + drift
        const SpMat left = SpMat(-I * k) + diss_.drift();

        Eigen::Map<const Mat> rho(y.data(), n_, n_);
        Eigen::Map<Mat> out(dy.data(), n_, n_);
        Y_.noalias() = left * rho;
        if (p_.eta > 0.0) add_dephasing(c.cavity, rho);
        diss_.add_sandwich_terms(rho, Y_, scratch_);
        out = Y_ + Y_.adjoint();
    }

private:
    // Bare dephasing eta D[a^dag a] seen from the displaced frame: jump operator
    // n + alpha* a + alpha a^dag, plus the Hamiltonian piece that keeps <delta a> = 0
    // (its mean-field share already damps alpha in the classical equation).
    template <class Rho>
    void add_dephasing(cplx alpha, const Rho& rho) {
        const SpMat jump = number_ + std::conj(alpha) * a_ + alpha * ad_;
        const SpMat jump_sq = jump * jump;
        scratch_.noalias() = jump_sq * rho;
        Y_.noalias() -= (0.5 * p_.eta) * scratch_;
        scratch_.noalias() = jump * rho;
        Y_.noalias() += (0.5 * p_.eta) * (scratch_ * jump);
        scratch_.noalias() = ad_ * rho;
        Y_.noalias() += (0.5 * p_.eta * alpha) * scratch_;
        scratch_.noalias() = a_ * rho;
        Y_.noalias() -= (0.5 * p_.eta * std::conj(alpha)) * scratch_;
    }

    SystemParams p_;
    const ClassicalTrack& track_;
    double t0_;
    Eigen::Index n_;
    Dissipation diss_;
    SpMat number_, a_, ad_;
    SpMat n_b_[2], a_b_[2], ad_b_[2];
    Mat Y_, scratch_;
};

ReadoutSample make_sample(const ModeSpace& space, double t, const Amplitudes& amp, const Mat& rho) {
    ReadoutSample s;
    s.time = t;
    s.classical = amp;
    s.fluctuation = occupations(space, rho);
    s.g2_detector = g2_zero_delay(rho, space, amp.detector, Mode::Detector);
    s.g2_cavity = g2_zero_delay(rho, space, amp.cavity, Mode::Cavity);
    return s;
}

}  // namespace

ReadoutTrajectory run_readout(const ModeSpace& space, const SystemParams& params, const SemiclassicalState& init,
                              const PulseSpec& readout, std::span<const double> sample_times,
                              const PropagationOptions& options) {
    params.validate();
    readout.validate();
    const auto n = space.total_dim();
    if (init.rho_fluct.rows() != n || init.rho_fluct.cols() != n)
        throw DomainError("fluctuation state does not match mode space");

    if (sample_times.empty()) return {};
    if (sample_times.front() < init.time) throw DomainError("sample time precedes readout start");

    const ClassicalTrack track(params, readout, init.classical, init.time, sample_times.back());
    // Free mechanical energy of each basis state, for leaving the interaction picture.
    Eigen::VectorXd energy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Occupation o = space.occupation_of(i);
        energy(i) = params.omega1 * o[1] + params.omega2 * o[2];
    }

    Vec y = Eigen::Map<const Vec>(init.rho_fluct.data(), n * n);
    ReadoutGenerator gen(space, params, track, init.time);
    RhsFunction rhs = [&gen](double t, const Vec& yv, Vec& dy) { gen(t, yv, dy); };
    const double ref_trace = init.rho_fluct.trace().real();
    ReadoutTrajectory traj;
    traj.samples.reserve(sample_times.size());
    auto on_sample = [&](double t, const Vec& yv) {
        const double tau = t - init.time;
        Mat rho(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                rho(i, j) = yv[j * n + i] * std::exp(cplx(0.0, -(energy(i) - energy(j)) * tau));
        enforce_invariants(rho, ref_trace, options, t);
        const Amplitudes amp = track.at(t);
        traj.samples.push_back(make_sample(space, t, amp, rho));
        traj.final_state = {amp, std::move(rho), t};
    };
    traj.stats = integrate(rhs, y, init.time, sample_times, on_sample, options.integrator);
    return traj;
}

std::vector<double> FringeScan::centers() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.readout_center);
    return v;
}

std::vector<double> FringeScan::detector_intensity() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.cut.total_occupation(Mode::Detector));
    return v;
}

std::vector<double> FringeScan::cavity_intensity() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.cut.total_occupation(Mode::Cavity));
    return v;
}

std::vector<double> readout_grid(double first, double step, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) v[k] = first + static_cast<double>(k) * step;
    return v;
}

FringeScan fringe_scan(const ModeSpace& space, const SystemParams& params, const SemiclassicalState& init,
                       const FringeSettings& settings, const PropagationOptions& options) {
    if (settings.centers.empty()) throw ParameterError("empty readout-time grid");
    const double beat = params.omega2 - params.omega1;
    FringeScan scan;
    scan.points.resize(settings.centers.size());
    parallel_for(settings.centers.size(), settings.jobs, [&](std::size_t k) {
        PulseSpec pulse = settings.readout_template;
        pulse.center = settings.centers[k];
        if (!(pulse.center > init.time)) throw ParameterError("readout centre must follow the readout start");
        const double cut = pulse.center + settings.tau_cut;
        const double samples[] = {cut};
        const ReadoutTrajectory tr = run_readout(space, params, init, pulse, samples, options);
        scan.points[k] = {pulse.center, tr.samples.back()};
    });

    const std::vector<double> t = scan.centers();
    std::vector<double> fluct;
    for (const auto& p : scan.points) fluct.push_back(p.cut.fluctuation[static_cast<std::size_t>(Mode::Detector)]);
    auto attempt = [&](auto&& fit, const char* what) {
        try {
            fit();
        } catch (const Error& e) {
            if (!scan.fit_error.empty()) scan.fit_error += "; ";
            scan.fit_error += std::string(what) + ": " + e.what();
        }
    };
    attempt([&] { scan.detector = visibility(t, scan.detector_intensity(), beat); }, "detector");
    attempt([&] { scan.cavity = visibility(t, scan.cavity_intensity(), beat); }, "cavity");
    attempt([&] { scan.detector_fluctuation = visibility(t, fluct, beat); }, "detector fluctuation");
    attempt([&] { scan.detector_frequency = free_frequency_fit(t, scan.detector_intensity(), 0.5 * beat, 1.5 * beat); },
            "frequency");
    return scan;
}

}  // namespace ombell
