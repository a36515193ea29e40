#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ombell/errors.hpp"
#include "ombell/liouville.hpp"

using namespace ombell;

namespace {

SystemParams quiet() {
    SystemParams p = SystemParams::reference_defaults();
    p.g1 = p.g2 = 0.0;
    return p;
}

Mat random_density(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    Mat x(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = cplx(d(rng), d(rng));
    Mat rho = x * x.adjoint();
    return rho / rho.trace();
}

std::vector<double> grid(double step, int count) {
    std::vector<double> t;
    for (int k = 1; k <= count; ++k) t.push_back(step * k);
    return t;
}

}  // namespace

TEST_SUITE("liouville") {
    TEST_CASE("generator is traceless and Hermitian") {
        const ModeSpace s(Dims{3, 3, 2, 3});
        SystemParams p = SystemParams::reference_defaults();
        p.n_th = 0.3;
        p.eta = 0.01 * p.kappa;
        const PulseSpec pulses[] = {PulseSpec::reference_write()};
        const OperatorMatrix H = assemble_hamiltonian(s, p, pulses, 47.0);
        CHECK(H.hermitian());
        const Mat rho = random_density(s.total_dim(), 3);
        const Mat d = lindblad_rhs(s, p, rho, H);
        CHECK(std::abs(d.trace()) < 1e-12 * d.norm());
        CHECK((d - d.adjoint()).norm() < 1e-13 * d.norm());
    }

    TEST_CASE("displaced Hamiltonian is Hermitian") {
        const ModeSpace s(Dims{3, 2, 2, 3});
        const SystemParams p = SystemParams::reference_defaults();
        Amplitudes cl;
        cl.cavity = cplx(3.0, -1.0);
        cl.mech1 = cplx(0.01, 0.02);
        const PulseSpec pulses[] = {PulseSpec::reference_readout(150.0)};
        const OperatorMatrix H = assemble_hamiltonian(s, p, pulses, 140.0, &cl);
        CHECK(H.hermitian());
    }

    TEST_CASE("cavity photon decays and feeds the detector") {
        const ModeSpace s(Dims{3, 2, 2, 3});
        const SystemParams p = quiet();
        QuantumState init = vacuum_state(s);
        init.rho.setZero();
        const Eigen::Index one = s.index_of({1, 0, 0, 0});
        init.rho(one, one) = 1.0;
        const std::vector<double> t = grid(2.0, 30);
        const auto states = propagate_all(s, p, {}, init, t);
        const double a = p.kappa_d / 2.0, c = p.kappa / 2.0, b = p.zeta / 2.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const auto n = occupations(s, states[k].rho);
            const double cd = -b * (std::exp(-c * t[k]) - std::exp(-a * t[k])) / (a - c);
            CHECK(n[0] == doctest::Approx(std::exp(-p.kappa * t[k])).epsilon(1e-6));
            CHECK(n[3] == doctest::Approx(cd * cd).epsilon(1e-6));
            CHECK(states[k].rho.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("mechanical mode thermalises") {
        const ModeSpace s(Dims{2, 8, 2, 2});
        SystemParams p = quiet();
        p.n_th = 0.2;
        const std::vector<double> t = grid(20.0, 10);
        const auto states = propagate_all(s, p, {}, vacuum_state(s), t);
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double expect = p.n_th * (1.0 - std::exp(-p.gamma1 * t[k]));
            CHECK(occupations(s, states[k].rho)[1] == doctest::Approx(expect).epsilon(1e-5));
        }
    }

    TEST_CASE("free mechanical coherence rotates at its frequency") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        const SystemParams p = quiet();
        QuantumState init = vacuum_state(s);
        init.rho.setZero();
        const Eigen::Index i0 = s.index_of({0, 0, 0, 0}), i1 = s.index_of({0, 1, 0, 0});
        init.rho(i0, i0) = init.rho(i1, i1) = init.rho(i0, i1) = init.rho(i1, i0) = 0.5;
        const std::vector<double> t = grid(0.37, 20);
        const auto states = propagate_all(s, p, {}, init, t);
        for (std::size_t k = 0; k < t.size(); ++k) {
            const cplx b = expectation(s.annihilation(Mode::Mech1), states[k].rho);
            const cplx expect = 0.5 * std::exp(cplx(-p.gamma1 / 2.0, -p.omega1) * t[k]);
            CHECK(std::abs(b - expect) < 1e-7);
        }
    }

    TEST_CASE("pure dephasing adds to the coherence decay") {
        const ModeSpace s(Dims{2, 2, 2, 2});
        SystemParams p = quiet();
        p.eta = 0.5 * p.kappa;
        QuantumState init = vacuum_state(s);
        init.rho.setZero();
        const Eigen::Index i0 = s.index_of({0, 0, 0, 0}), i1 = s.index_of({1, 0, 0, 0});
        init.rho(i0, i0) = init.rho(i1, i1) = init.rho(i0, i1) = init.rho(i1, i0) = 0.5;
        const std::vector<double> t = grid(0.5, 10);
        const auto states = propagate_all(s, p, {}, init, t);
        for (std::size_t k = 0; k < t.size(); ++k) {
            const cplx a = expectation(s.annihilation(Mode::Cavity), states[k].rho);
            CHECK(std::abs(a) == doctest::Approx(0.5 * std::exp(-(p.kappa + p.eta) * t[k] / 2.0)).epsilon(1e-6));
        }
    }

    TEST_CASE("weak drive follows the mean-field amplitude") {
        const ModeSpace s(Dims{6, 2, 2, 3});
        const SystemParams p = quiet();
        PulseSpec w = PulseSpec::reference_write();
        w.amplitude = 0.2 * p.kappa;
        const PulseSpec pulses[] = {w};
        const std::vector<double> t = grid(5.0, 20);
        const auto states = propagate_all(s, p, pulses, vacuum_state(s), t);
        auto rhs = [&](double tt, const Vec& y, Vec& dy) {
            dy[0] = -0.5 * p.kappa * y[0] - I * drive_envelope(w, tt);
            dy[1] = -0.5 * p.kappa_d * y[1] - 0.5 * p.zeta * y[0];
        };
        IntegratorOptions o;
        o.rtol = 1e-12;
        o.atol = 1e-18;
        Vec y = Vec::Zero(2);
        std::size_t k = 0;
        double worst = 0.0;
        integrate(rhs, y, 0.0, t,
                  [&](double, const Vec& v) {
                      worst = std::max({worst,
                                        std::abs(v[0] - expectation(s.annihilation(Mode::Cavity), states[k].rho)),
                                        std::abs(v[1] - expectation(s.annihilation(Mode::Detector), states[k].rho))});
                      ++k;
                  },
                  o);
        CHECK(worst < 1e-6);
    }

    TEST_CASE("invariant enforcement") {
        PropagationOptions o;
        Mat rho = Mat::Identity(4, 4) * 0.25;
        CHECK_NOTHROW(enforce_invariants(rho, 1.0, o, 0.0));
        rho(0, 0) += 1e-6;
        CHECK_THROWS_AS(enforce_invariants(rho, 1.0, o, 0.0), IntegrityError);
        rho = Mat::Identity(4, 4) * 0.25;
        rho(0, 1) = cplx(0.0, 1e-6);
        CHECK_THROWS_AS(enforce_invariants(rho, 1.0, o, 0.0), IntegrityError);
        o.check_positivity = true;
        rho = Mat::Identity(4, 4) * 0.25;
        rho(0, 0) = -0.01;
        rho(1, 1) = 0.51;
        CHECK_THROWS_AS(enforce_invariants(rho, 1.0, o, 0.0), IntegrityError);
    }
}
