#include <doctest.h>

#include <cmath>
#include <vector>

#include "ombell/analytic.hpp"
#include "ombell/errors.hpp"
#include "ombell/protocol.hpp"

using namespace ombell;

namespace {

ProtocolSchedule short_schedule() {
    ProtocolSchedule s;
    s.write_end = 60.0;
    s.write_sample_step = 2.0;
    return s;
}

}  // namespace

TEST_SUITE("protocol") {
    TEST_CASE("schedule validation and sampling") {
        ProtocolSchedule s;
        CHECK_NOTHROW(s.validate());
        CHECK(s.write_samples().size() == 601);
        CHECK(s.write_samples().back() == doctest::Approx(300.0));
        s.write_sample_step = 0.0;
        CHECK_THROWS_AS(s.validate(), ParameterError);
        const auto g = readout_grid(153.0, 0.5, 4);
        CHECK(g == std::vector<double>{153.0, 153.5, 154.0, 154.5});
    }

    TEST_CASE("herald projection") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        CHECK_THROWS_AS(herald_project(vacuum_state(s), s), NoClickError);
        QuantumState q = vacuum_state(s);
        q.rho.setZero();
        const Eigen::Index a = s.index_of({0, 0, 1, 1}), b = s.index_of({0, 1, 0, 1}), c = s.index_of({1, 0, 0, 0});
        q.rho(a, a) = q.rho(b, b) = q.rho(a, b) = q.rho(b, a) = 0.01;
        q.rho(c, c) = 0.98;
        CHECK(herald_probability(q.rho, s) == doctest::Approx(0.02));
        const QuantumState h = herald_project(q, s);
        CHECK(h.rho.trace().real() == doctest::Approx(1.0));
        CHECK(h.rho(a, b).real() == doctest::Approx(0.5));
    }

    TEST_CASE("conditional mechanical state traces out the cavity") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        // Block over cavity (x) mech1 (x) mech2 for detector = 1.
        Mat block = Mat::Zero(8, 8);
        block(1, 1) = block(2, 2) = 0.3;  // cavity 0: |01>, |10>
        block(1, 2) = block(2, 1) = 0.3;
        block(4, 4) = 0.4;  // cavity 1: |00>
        const Mat rm = conditional_mechanical_state(block, s);
        CHECK(rm.trace().real() == doctest::Approx(1.0));
        CHECK(rm(0, 0).real() == doctest::Approx(0.4));
        CHECK(rm(1, 2).real() == doctest::Approx(0.3));
        CHECK(concurrence(two_qubit_restrict(rm, 2, 2)) == doctest::Approx(0.6));
        CHECK_THROWS_AS(conditional_mechanical_state(Mat::Zero(8, 8), s), NoClickError);
        CHECK_THROWS_AS(conditional_mechanical_state(Mat::Zero(4, 4), s), DomainError);
    }

    TEST_CASE("best herald index") {
        std::vector<HeraldPoint> scan(5);
        for (std::size_t k = 0; k < scan.size(); ++k) scan[k].time = 80.0 + k;
        CHECK_FALSE(best_herald_index(scan, 83.0).has_value());
        scan[0].mechanical_state = Mat::Identity(4, 4) / 4.0;
        scan[4].mechanical_state = Mat::Identity(4, 4) / 4.0;
        CHECK(*best_herald_index(scan, 83.0) == 4);
        scan[0].concurrence = 0.2;
        scan[1].concurrence = 0.0;
        CHECK(*best_herald_index(scan, 83.0) == 0);
    }

    TEST_CASE("mechanical state helpers") {
        const PureWriteState bell = PureWriteState::bell(0.0);
        const Mat r3 = mechanical_pure_state(bell.vector(), 3, 3);
        CHECK(r3(1, 3).real() == doctest::Approx(0.5));  // |01><10|
        const Mat r2 = adapt_mechanical_state(r3, 3, 3, 2, 2);
        CHECK(r2(1, 2).real() == doctest::Approx(0.5));
        const Mat back = adapt_mechanical_state(r2, 2, 2, 3, 3);
        CHECK((back - r3).norm() < 1e-15);
        CHECK_THROWS_AS(adapt_mechanical_state(r3, 2, 2, 3, 3), DomainError);
        CHECK_THROWS_AS(mechanical_pure_state(bell.vector(), 1, 3), DomainError);
    }

    TEST_CASE("write run without a drive never clicks") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        SystemParams p = SystemParams::reference_defaults();
        ProtocolSchedule sch = short_schedule();
        sch.write.amplitude = 0.0;
        const WriteTrajectory w = run_write(s, p, sch, vacuum_state(s));
        const auto scan = herald_scan(w, s);
        for (const HeraldPoint& h : scan) {
            CHECK(h.herald_probability == 0.0);
            CHECK_FALSE(h.concurrence.has_value());
        }
        CHECK_FALSE(best_herald_index(scan, 83.0).has_value());
    }

    TEST_CASE("driven write run stays physical") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        const SystemParams p = SystemParams::reference_defaults();
        PropagationOptions o;
        o.check_positivity = true;
        const WriteTrajectory w = run_write(s, p, short_schedule(), vacuum_state(s), o);
        CHECK(w.times.size() == 31);
        CHECK(w.final_state.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
        const auto scan = herald_scan(w, s);
        bool clicked = false;
        for (const HeraldPoint& h : scan) {
            if (h.concurrence) {
                clicked = true;
                CHECK(*h.concurrence >= 0.0);
                CHECK(*h.concurrence <= 1.0);
            }
        }
        CHECK(clicked);
    }

    TEST_CASE("undriven readout: classical part stays zero, phonons decay") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        const SystemParams p = SystemParams::reference_defaults();
        PulseSpec r = PulseSpec::reference_readout(120.0);
        r.amplitude = 0.0;
        const SemiclassicalState init =
            prepare_readout_initial(mechanical_pure_state(PureWriteState::bell(0.0).vector(), 2, 2), s, 83.0);
        const std::vector<double> t{83.0, 100.0, 130.0};
        const ReadoutTrajectory tr = run_readout(s, p, init, r, t);
        REQUIRE(tr.samples.size() == 3);
        for (const ReadoutSample& x : tr.samples) {
            const double dt = x.time - 83.0;
            CHECK(std::abs(x.classical.cavity) == 0.0);
            CHECK(x.fluctuation[1] == doctest::Approx(0.5 * std::exp(-p.gamma1 * dt)).epsilon(1e-6));
            CHECK(x.fluctuation[2] == doctest::Approx(0.5 * std::exp(-p.gamma2 * dt)).epsilon(1e-6));
        }
    }

    TEST_CASE("readout classical amplitude follows the mean-field drive when g = 0") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        SystemParams p = SystemParams::reference_defaults();
        p.g1 = p.g2 = 0.0;
        const PulseSpec r = PulseSpec::reference_readout(120.0);
        const SemiclassicalState init =
            prepare_readout_initial(mechanical_pure_state(PureWriteState::bell(0.0).vector(), 2, 2), s, 83.0);
        std::vector<double> t;
        for (int k = 0; k <= 20; ++k) t.push_back(83.0 + 4.0 * k);
        const ReadoutTrajectory tr = run_readout(s, p, init, r, t);
        auto rhs = [&](double tt, const Vec& y, Vec& dy) {
            dy[0] = -0.5 * p.kappa * y[0] - I * drive_envelope(r, tt);
            dy[1] = -0.5 * p.kappa_d * y[1] - 0.5 * p.zeta * y[0];
        };
        IntegratorOptions o;
        o.rtol = 1e-12;
        o.atol = 1e-14;
        Vec y = Vec::Zero(2);
        std::size_t k = 0;
        integrate(rhs, y, 83.0, t,
                  [&](double, const Vec& v) {
                      CHECK(std::abs(v[0] - tr.samples[k].classical.cavity) < 1e-6 * (1.0 + std::abs(v[0])));
                      CHECK(std::abs(v[1] - tr.samples[k].classical.detector) < 1e-6 * (1.0 + std::abs(v[1])));
                      // No coupling: fluctuations never see the cavity pump.
                      CHECK(tr.samples[k].fluctuation[0] < 1e-12);
                      ++k;
                  },
                  o);
    }

    TEST_CASE("fringe scan needs a grid") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        const SemiclassicalState init =
            prepare_readout_initial(mechanical_pure_state(PureWriteState::bell(0.0).vector(), 2, 2), s, 83.0);
        FringeSettings f;
        CHECK_THROWS_AS(fringe_scan(s, SystemParams::reference_defaults(), init, f), ParameterError);
        f.centers = {80.0};
        CHECK_THROWS_AS(fringe_scan(s, SystemParams::reference_defaults(), init, f), ParameterError);
    }
}
