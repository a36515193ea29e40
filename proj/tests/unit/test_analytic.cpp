#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ombell/analytic.hpp"
#include "ombell/errors.hpp"
#include "ombell/params.hpp"

using namespace ombell;

TEST_SUITE("analytic") {
    TEST_CASE("reference states") {
        const PureWriteState bell = PureWriteState::bell(0.3);
        CHECK(analytic_concurrence(bell) == doctest::Approx(1.0));
        CHECK(analytic_visibility(bell) == doctest::Approx(1.0));
        CHECK(analytic_intensity(PureWriteState::bell(0.0)) == doctest::Approx(2.0));
        CHECK(analytic_intensity(PureWriteState::bell(std::numbers::pi)) == doctest::Approx(0.0).epsilon(1e-12));
        const PureWriteState sep = PureWriteState::separable(0.0);
        CHECK(analytic_concurrence(sep) == doctest::Approx(0.0));
        CHECK(analytic_visibility(sep) == doctest::Approx(0.5));
    }

    TEST_CASE("V = C/(2-C) on the c00 = 0 family") {
        for (double w11 : {0.0, 0.05, 0.2, 0.5, 0.9}) {
            const double a = std::sqrt((1.0 - w11) / 2.0);
            const PureWriteState s{0.0, a, cplx(0.0, a), std::sqrt(w11)};
            const double C = analytic_concurrence(s);
            CHECK(std::abs(analytic_visibility(s) - visibility_from_concurrence(C)) < 1e-12);
        }
    }

    TEST_CASE("domain errors") {
        CHECK_THROWS_AS(analytic_concurrence(PureWriteState{1.0, 1.0, 0.0, 0.0}), DomainError);
        const double r = 1.0 / std::sqrt(2.0);
        CHECK_THROWS_AS(analytic_visibility(PureWriteState{0.0, r, 0.0, r}), DomainError);
        CHECK_THROWS_AS(analytic_visibility(PureWriteState{1.0, 0.0, 0.0, 0.0}), DomainError);
        CHECK_THROWS_AS(visibility_from_concurrence(1.5), DomainError);
        CHECK_THROWS_AS(dephasing_rate_estimate(std::vector<ExtraMode>{}), DomainError);
    }

    TEST_CASE("dephasing estimate") {
        const ExtraMode m{units::from_MHz(500.0), units::from_MHz(1.0), units::from_kHz(50.0), 0.5};
        const double single = (m.n_th + 1.0) * m.gamma * std::pow(m.g / m.omega, 2);
        CHECK(dephasing_rate_estimate(std::vector<ExtraMode>{m}) == doctest::Approx(single));
        CHECK(dephasing_rate_estimate(std::vector<ExtraMode>{m, m}) == doctest::Approx(2.0 * single));
        CHECK(dephasing_rate_estimate_symmetric(m) == doctest::Approx(std::pow(m.g / m.omega, 2) * 2.0 * m.gamma));
    }
}
