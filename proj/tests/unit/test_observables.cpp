#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ombell/errors.hpp"
#include "ombell/observables.hpp"
#include "ombell/state.hpp"

using namespace ombell;

namespace {

Eigen::Matrix4cd pure(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

}  // namespace

TEST_SUITE("observables") {
    TEST_CASE("partial trace of a product state") {
        const ModeSpace s(Dims{2, 3, 2, 2});
        const QuantumState t = thermal_state(s, 0.4, 0.1);
        const Mat m1 = partial_trace(t.rho, s, {Mode::Mech1});
        const Eigen::VectorXd p = thermal_populations(0.4, 3);
        for (int k = 0; k < 3; ++k) CHECK(m1(k, k).real() == doctest::Approx(p(k)));
        const Mat mm = partial_trace(t.rho, s, {Mode::Mech1, Mode::Mech2});
        CHECK(mm.rows() == 6);
        CHECK(mm.trace().real() == doctest::Approx(1.0));
        CHECK(partial_trace(t.rho, s, {Mode::Cavity, Mode::Mech1, Mode::Mech2, Mode::Detector}).isApprox(t.rho));
    }

    TEST_CASE("concurrence of reference states") {
        const double r = 1.0 / std::sqrt(2.0);
        CHECK(concurrence({pure(Eigen::Vector4cd(0, r, r, 0)), 1.0}) == doctest::Approx(1.0));
        CHECK(concurrence({pure(Eigen::Vector4cd(r, 0, 0, cplx(0, r))), 1.0}) == doctest::Approx(1.0));
        CHECK(concurrence({pure(Eigen::Vector4cd(0.5, 0.5, 0.5, 0.5)), 1.0}) < 1e-15);
        CHECK(concurrence({pure(Eigen::Vector4cd(1, 0, 0, 0)), 1.0}) < 1e-15);
        // Werner family: p |psi-><psi-| + (1-p) I/4 has C = max(0, (3p-1)/2).
        for (double p : {0.1, 0.3, 1.0 / 3.0, 0.5, 0.8}) {
            const Eigen::Matrix4cd w =
                p * pure(Eigen::Vector4cd(0, r, -r, 0)) + (1.0 - p) * Eigen::Matrix4cd::Identity() / 4.0;
            CHECK(concurrence({w, 1.0}) == doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)));
            CHECK(concurrence_eigen_route(w) == doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).epsilon(1e-6));
        }
    }

    TEST_CASE("tiny populations keep the pure-state concurrence") {
        // |00> with a 1e-8 admixture of a Bell pair: C = 2|c01 c10| exactly.
        const double e = 1e-8;
        const Eigen::Vector4cd v(std::sqrt(1.0 - 2.0 * e * e), e, e, 0);
        CHECK(concurrence({pure(v), 1.0}) == doctest::Approx(2.0 * e * e).epsilon(1e-8));
    }

    TEST_CASE("two-qubit restriction") {
        Mat rm = Mat::Zero(9, 9);
        rm(1, 1) = 0.4;  // |01>
        rm(3, 3) = 0.4;  // |10>
        rm(1, 3) = rm(3, 1) = 0.4;
        rm(8, 8) = 0.2;  // |22>, outside the qubit block
        const TwoQubitState q = two_qubit_restrict(rm, 3, 3);
        CHECK(q.retained_probability == doctest::Approx(0.8));
        CHECK(q.rho.trace().real() == doctest::Approx(1.0));
        CHECK(concurrence(q) == doctest::Approx(1.0));
        Mat out = Mat::Zero(9, 9);
        out(8, 8) = 1.0;
        CHECK_THROWS_AS(two_qubit_restrict(out, 3, 3), DegenerateStateError);
    }

    TEST_CASE("g2 of reference states") {
        const ModeSpace s(Dims{12, 2, 2, 2});
        const QuantumState vac = vacuum_state(s);
        const G2 coh = g2_zero_delay(vac.rho, s, cplx(0.3, 0.4), Mode::Cavity);
        CHECK(coh.defined);
        CHECK(coh.value == doctest::Approx(1.0));
        CHECK(coh.intensity == doctest::Approx(0.25));

        Mat fock = Mat::Zero(s.total_dim(), s.total_dim());
        const Eigen::Index one = s.index_of({1, 0, 0, 0});
        fock(one, one) = 1.0;
        CHECK(g2_zero_delay(fock, s, 0.0, Mode::Cavity).value == doctest::Approx(0.0));

        Mat th = Mat::Zero(s.total_dim(), s.total_dim());
        const Eigen::VectorXd p = thermal_populations(0.05, 12);
        for (int k = 0; k < 12; ++k) th(s.index_of({k, 0, 0, 0}), s.index_of({k, 0, 0, 0})) = p(k);
        CHECK(g2_zero_delay(th, s, 0.0, Mode::Cavity).value == doctest::Approx(2.0).epsilon(1e-6));

        CHECK_FALSE(g2_zero_delay(vac.rho, s, 0.0, Mode::Cavity).defined);
    }

    TEST_CASE("displaced moments") {
        const ModeSpace s(Dims{3, 2, 2, 2});
        const QuantumState vac = vacuum_state(s);
        const cplx a(0.2, -0.7);
        const Moment m = displaced_normal_moment(vac.rho, s, a, Mode::Cavity, 2, 2);
        CHECK(std::abs(m.value - std::pow(std::norm(a), 2)) < 1e-14);
        CHECK_FALSE(m.truncation_warning);
        CHECK(displaced_normal_moment(vac.rho, s, a, Mode::Cavity, 3, 3).truncation_warning);
    }

    TEST_CASE("visibility fit recovers synthetic fringes") {
        const double omega = 2.0 * std::numbers::pi * 0.28;
        std::vector<double> t, y;
        for (int k = 0; k < 16; ++k) {
            t.push_back(150.0 + 0.5 * k);
            y.push_back(3.0 * (1.0 + 0.7 * std::cos(omega * t.back() + 0.4)));
        }
        const VisibilityFit f = visibility(t, y, omega);
        CHECK(f.visibility == doctest::Approx(0.7));
        CHECK(f.mean == doctest::Approx(3.0));
        CHECK(std::remainder(f.phase - 0.4, 2.0 * std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(f.residual < 1e-12);
        const FrequencyFit ff = free_frequency_fit(t, y, 0.5 * omega, 1.5 * omega);
        CHECK(ff.omega == doctest::Approx(omega).epsilon(1e-6));
    }

    TEST_CASE("visibility fit preconditions") {
        const double omega = 2.0 * std::numbers::pi * 0.28;
        std::vector<double> t{0, 1, 2, 3, 4}, y{1, 1, 1, 1, 1};
        CHECK_THROWS_AS(visibility(t, y, omega), DomainError);
        t.clear();
        y.clear();
        for (int k = 0; k < 16; ++k) {
            t.push_back(0.5 * k);
            y.push_back(-1.0);
        }
        CHECK_THROWS_AS(visibility(t, y, omega), FitError);
    }
}
