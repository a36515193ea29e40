#include "ombell/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ombell/errors.hpp"

namespace ombell {

bool SelfcheckReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

CheckResult below(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value < threshold, value, threshold, std::move(detail)};
}

Eigen::Vector4cd random_pure(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(n(rng), n(rng));
    return v.normalized();
}

}  // namespace

WriteSummary summarize_write(const ModeSpace& space, const SystemParams& params, const ProtocolSchedule& schedule,
                             const QuantumState& initial, const PropagationOptions& options, bool track_spectrum) {
    WriteSummary s;
    s.min_eigenvalue = std::numeric_limits<double>::infinity();
    // run_write stores herald blocks only; watch the full state separately.
    PropagationOptions opt = options;
    QuantumState start = initial;
    start.time = schedule.write_start;
    const std::vector<double> samples = schedule.write_samples();
    const PulseSpec pulses[] = {schedule.write};
    const double ref = initial.rho.trace().real();
    // One propagation feeds both the trajectory and the diagnostics.
    WriteTrajectory traj;
    std::vector<Eigen::Index> idx;
    for (int c = 0; c < space.dim(Mode::Cavity); ++c)
        for (int m1 = 0; m1 < space.dim(Mode::Mech1); ++m1)
            for (int m2 = 0; m2 < space.dim(Mode::Mech2); ++m2) idx.push_back(space.index_of({c, m1, m2, 1}));
    traj.stats = propagate(
        space, params, pulses, start, samples,
        [&](const QuantumState& st) {
            const StateDiagnostics d = diagnose(st.rho, track_spectrum);
            s.max_trace_drift = std::max(s.max_trace_drift, std::abs(st.rho.trace().real() - ref));
            s.max_hermiticity_defect = std::max(s.max_hermiticity_defect, d.hermiticity_error);
            if (track_spectrum) s.min_eigenvalue = std::min(s.min_eigenvalue, d.min_eigenvalue);
            traj.times.push_back(st.time);
            traj.occupations.push_back(occupations(space, st.rho));
            const auto n = static_cast<Eigen::Index>(idx.size());
            Mat b(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    b(i, j) = st.rho(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            traj.herald_blocks.push_back(std::move(b));
            traj.final_state = st;
        },
        opt);
    s.heralds = herald_scan(traj, space);
    for (const HeraldPoint& h : s.heralds)
        if (h.concurrence && *h.concurrence > s.c_max) {
            s.c_max = *h.concurrence;
            s.t_at_max = h.time;
            s.n_c_at_max = h.cavity_occupation;
        }
    if (!track_spectrum) s.min_eigenvalue = 0.0;
    s.trajectory = std::move(traj);
    return s;
}

CheckResult check_weak_drive(const WriteSummary& summary, const ModeSpace& space, double herald_time) {
    // Conditional mechanical populations by total phonon number at the herald time.
    const HeraldPoint* at = nullptr;
    for (const HeraldPoint& h : summary.heralds)
        if (h.mechanical_state.size() > 0 &&
            (!at || std::abs(h.time - herald_time) < std::abs(at->time - herald_time)))
            at = &h;
    if (!at) return {"weak drive: P(>=2 quanta)/P(1 quantum) at herald", false, 0.0, 1e-2, "no click"};
    double one = 0.0, more = 0.0;
    const int d2 = space.dim(Mode::Mech2);
    for (Eigen::Index i = 0; i < at->mechanical_state.rows(); ++i) {
        const int q = static_cast<int>(i / d2) + static_cast<int>(i % d2);
        const double w = at->mechanical_state(i, i).real();
        if (q == 1) one += w;
        if (q >= 2) more += w;
    }
    std::ostringstream os;
    os << "t=" << at->time << " ns, P1=" << one << ", P2+=" << more;
    if (one <= 0.0) return {"weak drive: P(>=2 quanta)/P(1 quantum) at herald", false, 0.0, 1e-2, os.str()};
    return below("weak drive: P(>=2 quanta)/P(1 quantum) at herald", more / one, 1e-2, os.str());
}

CheckResult check_ehrenfest(const RunConfig& config) {
    SystemParams p = config.params();
    p.g1 = 0.0;
    p.g2 = 0.0;
    const ModeSpace space(Dims{12, 2, 2, 4});
    const ProtocolSchedule sched = config.schedule();
    const PulseSpec pulses[] = {sched.write};
    std::vector<double> samples;
    for (int k = 0; k <= 200; ++k) samples.push_back(static_cast<double>(k));

    std::vector<cplx> qa, qd;
    PropagationOptions opt = config.propagation();
    propagate(space, p, pulses, vacuum_state(space), samples,
              [&](const QuantumState& s) {
                  qa.push_back(expectation(space.annihilation(Mode::Cavity), s.rho));
                  qd.push_back(expectation(space.annihilation(Mode::Detector), s.rho));
              },
              opt);

    // Mean-field equations for the same drive.
    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        dy[0] = -0.5 * (p.kappa + p.eta) * y[0] - I * drive_envelope(sched.write, t);
        dy[1] = -0.5 * p.kappa_d * y[1] - 0.5 * p.zeta * y[0];
    };
    IntegratorOptions tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-18;
    Vec y = Vec::Zero(2);
    double worst = 0.0;
    std::size_t k = 0;
    integrate(rhs, y, 0.0, samples,
              [&](double, const Vec& v) {
                  worst = std::max({worst, std::abs(v[0] - qa[k]), std::abs(v[1] - qd[k])});
                  ++k;
              },
              tight);
    return below("Ehrenfest <a>,<d> vs mean-field (g=0, 200 ns)", worst, 1e-6, "dims [12,2,2,4]");
}

CheckResult check_detailed_balance(const RunConfig& config) {
    SystemParams p = config.params();
    p.n_th = 0.5;
    const ModeSpace space(Dims{2, 4, 4, 2});
    const double t_end = 25.0 / std::min(p.gamma1, p.gamma2);
    const double samples[] = {t_end};
    Mat final_rho;
    propagate(space, p, {}, vacuum_state(space), samples, [&](const QuantumState& s) { final_rho = s.rho; },
              config.propagation());
    double worst = 0.0;
    for (Mode m : {Mode::Mech1, Mode::Mech2}) {
        const Mat red = partial_trace(final_rho, space, {m});
        const Eigen::VectorXd target = thermal_populations(p.n_th, space.dim(m));
        double kl = 0.0;
        for (Eigen::Index i = 0; i < target.size(); ++i) {
            const double q = std::max(red(i, i).real(), 1e-300);
            kl += target(i) * std::log(target(i) / q);
        }
        worst = std::max(worst, std::abs(kl));
    }
    std::ostringstream os;
    os << "n_th=0.5, t=" << t_end << " ns";
    return below("detailed balance: KL(thermal || relaxed)", worst, 1e-6, os.str());
}

CheckResult check_concurrence_formula(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        const Eigen::Vector4cd c = random_pure(rng);
        TwoQubitState q{c * c.adjoint(), 1.0};
        const double formula = 2.0 * std::abs(c(2) * c(1) - c(0) * c(3));
        worst = std::max(worst, std::abs(concurrence(q) - formula));
    }
    return below("concurrence vs 2|c10 c01 - c00 c11| (random pure)", worst, 1e-10,
                 std::to_string(count) + " states");
}

CheckResult check_concurrence_oracle_mixed(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        double total = 0.0;
        for (int r = 0; r < 3; ++r) {
            const Eigen::Vector4cd v = random_pure(rng);
            const double w = u(rng);
            rho += w * v * v.adjoint();
            total += w;
        }
        rho /= total;
        worst = std::max(worst, std::abs(concurrence({rho, 1.0}) - concurrence_eigen_route(rho)));
    }
    return below("concurrence vs eigenvalue oracle (random mixed)", worst, 1e-7, std::to_string(count) + " states");
}

CheckResult check_visibility_law(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed + 7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        // c00 = 0, |c01| = |c10|: the domain of the closed-form visibility.
        const double w11 = u(rng);
        const double a = std::sqrt((1.0 - w11) / 2.0);
        const double ph1 = 2.0 * std::numbers::pi * u(rng), ph2 = 2.0 * std::numbers::pi * u(rng);
        const PureWriteState s{0.0, a * std::exp(cplx(0, ph1)), a, std::sqrt(w11) * std::exp(cplx(0, ph2))};
        worst = std::max(worst, std::abs(analytic_visibility(s) - visibility_from_concurrence(analytic_concurrence(s))));
    }
    return below("analytic V = C/(2-C) for c00 = 0", worst, 1e-12, std::to_string(count) + " states");
}

namespace {

double bell_fringe_visibility(const RunConfig& config, const SystemParams& p) {
    const ModeSpace fs = config.readout_space();
    const Mat rm = mechanical_pure_state(PureWriteState::bell(config.readout.bell_phase_rad).vector(),
                                         fs.dim(Mode::Mech1), fs.dim(Mode::Mech2));
    const SemiclassicalState init = prepare_readout_initial(rm, fs, config.readout.herald_time_ns);
    FringeSettings f = config.fringe_settings();
    f.centers = readout_grid(config.readout.herald_time_ns + config.readout.first_center_offset_ns, 0.8, 8);
    const FringeScan scan = fringe_scan(fs, p, init, f, config.propagation());
    if (!scan.detector) throw FitError("gauge check fringe fit failed: " + scan.fit_error);
    return scan.detector->visibility;
}

}  // namespace

SelfcheckReport run_selfcheck(const RunConfig& config, const SelfcheckOptions& options) {
    SelfcheckReport report;
    auto& out = report.checks;
    const SystemParams p = config.params();
    const ModeSpace space = config.write_space();
    const ProtocolSchedule sched = config.schedule();
    const QuantumState init = thermal_state(space, p.n_th, p.n_th);
    PropagationOptions opt = config.propagation();
    opt.positivity_tolerance = std::numeric_limits<double>::infinity();  // measured, not enforced, here

    const WriteSummary base = summarize_write(space, p, sched, init, opt, true);
    out.push_back(below("trace drift over write run", base.max_trace_drift, 1e-8));
    out.push_back(below("Hermiticity defect over write run", base.max_hermiticity_defect, 1e-10));
    out.push_back({"positivity: min eigenvalue over write run", base.min_eigenvalue >= -1e-8, base.min_eigenvalue,
                   -1e-8, ">= threshold"});
    out.push_back(check_weak_drive(base, space, sched.herald_time));
    out.push_back(check_ehrenfest(config));
    out.push_back(check_detailed_balance(config));
    out.push_back(check_concurrence_formula(config.seed, options.random_states));
    out.push_back(check_concurrence_oracle_mixed(config.seed, options.random_states));
    out.push_back(check_visibility_law(config.seed, options.random_states));

    if (options.include_gauge) {
        SystemParams flipped = p;
        flipped.g1 = -p.g1;
        const WriteSummary alt = summarize_write(space, flipped, sched, init, config.propagation(), false);
        double occ = 0.0;
        for (std::size_t k = 0; k < base.trajectory.occupations.size(); ++k)
            for (std::size_t m = 0; m < kModeCount; ++m)
                occ = std::max(occ, std::abs(base.trajectory.occupations[k][m] - alt.trajectory.occupations[k][m]));
        double dc = 0.0;
        for (std::size_t k = 0; k < base.heralds.size(); ++k)
            dc = std::max(dc, std::abs(base.heralds[k].concurrence.value_or(0.0) - alt.heralds[k].concurrence.value_or(0.0)));
        out.push_back(below("gauge g1 -> -g1: occupations", occ, 1e-6));
        out.push_back(below("gauge g1 -> -g1: concurrence C(t_P)", dc, 1e-6));
        const double dv = std::abs(bell_fringe_visibility(config, p) - bell_fringe_visibility(config, flipped));
        out.push_back(below("gauge g1 -> -g1: fringe visibility", dv, 1e-6, "Bell init, 8 readout times"));
    }

    if (options.include_truncation) {
        const ModeSpace fine = build_mode_space(options.refined_dims,
                                                static_cast<std::size_t>(config.truncation.max_total_dim));
        const WriteSummary refined =
            summarize_write(fine, p, sched, thermal_state(fine, p.n_th, p.n_th), config.propagation(), false);
        std::ostringstream os;
        os << "C_max " << base.c_max << " vs " << refined.c_max;
        out.push_back(below("truncation: |dC_max| [3,3,3,3] -> [4,4,4,3]", std::abs(base.c_max - refined.c_max), 0.02,
                            os.str()));
    }
    return report;
}

}  // namespace ombell
