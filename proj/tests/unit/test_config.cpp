#include <doctest.h>

#include <cmath>

#include "ombell/config.hpp"
#include "ombell/errors.hpp"

using namespace ombell;

TEST_SUITE("config") {
    TEST_CASE("defaults carry the reference parameters") {
        const RunConfig c;
        CHECK_NOTHROW(c.validate());
        const SystemParams p = c.params();
        CHECK(units::to_MHz(p.omega1) == doctest::Approx(700.0));
        CHECK(units::to_kHz(p.g2) == doctest::Approx(84.0));
        CHECK(units::to_MHz(p.gamma1) == doctest::Approx(4.4));
        const ProtocolSchedule s = c.schedule();
        CHECK(s.write.amplitude == doctest::Approx(2.5 * p.kappa));
        CHECK(s.readout.amplitude == doctest::Approx(150.0 * p.kappa));
        CHECK(units::to_MHz(s.readout.detuning) == doctest::Approx(-840.0));
        CHECK(s.tau_cut == doctest::Approx(52.5));
        CHECK(c.fringe_settings().centers.size() == 16);
        CHECK(c.fringe_settings().centers.front() == doctest::Approx(153.0));
    }

    TEST_CASE("round trip is idempotent") {
        RunConfig c;
        c.physics.n_th = 0.05;
        c.truncation.write_dims = {4, 4, 4, 3};
        c.readout.init = "heralded";
        c.readout.bell_phase_rad = 0.1234567890123;
        c.sweep.thermal_n_th = {0.1};
        c.extra_modes.push_back({1500.0, 2.0, 30.0, 0.1});
        const std::string once = serialize_config(c);
        const std::string twice = serialize_config(parse_config(once));
        CHECK(once == twice);
        const RunConfig back = parse_config(once);
        CHECK(back.readout.bell_phase_rad == c.readout.bell_phase_rad);
        CHECK(back.truncation.write_dims == c.truncation.write_dims);
        CHECK(back.extra_modes.size() == 1);
    }

    TEST_CASE("partial documents fill in defaults") {
        const RunConfig c = parse_config(R"({"physics": {"n_th": 0.02}, "jobs": 2})");
        CHECK(c.physics.n_th == 0.02);
        CHECK(c.jobs == 2);
        CHECK(c.physics.kappa_over_2pi_MHz == 200.0);
    }

    TEST_CASE("rejections") {
        CHECK_THROWS_AS(parse_config(R"({"physics": {"kappa_MHz": 200}})"), ParameterError);
        CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ParameterError);
        CHECK_THROWS_AS(parse_config(R"({"physics": {"n_th": "hot"}})"), ParameterError);
        CHECK_THROWS_AS(parse_config("{not json"), ParameterError);
        CHECK_THROWS_AS(parse_config(R"({"truncation": {"write_dims": [9, 9, 9, 9]}})"), CapacityError);
        CHECK_THROWS_AS(parse_config(R"({"readout": {"init": "maybe"}})"), ParameterError);
        CHECK_THROWS_AS(parse_config(R"({"physics": {"zeta_over_kappa": 0.5}})"), ParameterError);
        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParameterError);
    }
}
