#include <cmath>
#include <limits>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "ombell/analytic.hpp"
#include "ombell/config.hpp"
#include "ombell/errors.hpp"
#include "ombell/observables.hpp"

namespace py = pybind11;
using namespace ombell;

namespace {

RunConfig config_from(const std::string& json_text) {
    RunConfig c = json_text.empty() ? RunConfig{} : parse_config(json_text);
    c.validate();
    return c;
}

py::dict write_result(const RunConfig& c) {
    const cli::WriteRun w = cli::execute_write(c);
    const auto n = static_cast<Eigen::Index>(w.trajectory.times.size());
    Eigen::VectorXd t(n), C(n), herald(n);
    Eigen::MatrixXd occ(n, 4);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        t(k) = w.trajectory.times[i];
        for (int m = 0; m < 4; ++m) occ(k, m) = w.trajectory.occupations[i][static_cast<std::size_t>(m)];
        C(k) = w.heralds[i].concurrence.value_or(std::numeric_limits<double>::quiet_NaN());
        herald(k) = w.heralds[i].herald_probability;
    }
    py::dict d;
    d["t_ns"] = t;
    d["occupations"] = occ;
    d["C"] = C;
    d["herald_prob"] = herald;
    if (w.best) {
        const HeraldPoint& h = w.heralds[*w.best];
        d["t_P_ns"] = h.time;
        d["C_max"] = h.concurrence.value_or(0.0);
        d["n_c_at_t_P"] = h.cavity_occupation;
        d["mechanical_state"] = h.mechanical_state;
    }
    return d;
}

py::object fit_dict(const std::optional<VisibilityFit>& f) {
    if (!f) return py::none();
    py::dict d;
    d["visibility"] = f->visibility;
    d["mean"] = f->mean;
    d["phase"] = f->phase;
    d["omega"] = f->omega;
    d["residual"] = f->residual;
    return d;
}

py::dict fringe_result(const RunConfig& c) {
    const FringeScan s = cli::execute_fringe(c, cli::readout_initial(c));
    py::dict d;
    d["t_R_ns"] = s.centers();
    d["I_detector"] = s.detector_intensity();
    d["I_cavity"] = s.cavity_intensity();
    std::vector<double> g2;
    for (const auto& p : s.points)
        g2.push_back(p.cut.g2_detector.defined ? p.cut.g2_detector.value : std::numeric_limits<double>::quiet_NaN());
    d["g2_detector"] = g2;
    d["detector_fit"] = fit_dict(s.detector);
    d["cavity_fit"] = fit_dict(s.cavity);
    d["fit_error"] = s.fit_error;
    return d;
}

PureWriteState pure(cplx c00, cplx c01, cplx c10, cplx c11) { return {c00, c01, c10, c11}; }

}  // namespace

PYBIND11_MODULE(_ombell, m) {
    m.doc() = "Optomechanical Bell-state simulator core";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
    py::register_exception<NoClickError>(m, "NoClickError", PyExc_RuntimeError);
    py::register_exception<DegenerateStateError>(m, "DegenerateStateError", PyExc_RuntimeError);
    py::register_exception<StiffnessError>(m, "StiffnessError", PyExc_RuntimeError);
    py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_RuntimeError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);

    m.def("from_MHz", &units::from_MHz, "f/2pi in MHz -> rad/ns");
    m.def("to_MHz", &units::to_MHz, "rad/ns -> f/2pi in MHz");

    m.def("default_config", [] { return serialize_config(RunConfig{}); }, "Default run configuration as JSON text");
    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
          "Parse, validate and re-serialize a configuration", py::arg("config_json"));

    m.def("concurrence", [](const Eigen::Matrix4cd& rho) { return concurrence({rho, 1.0}); },
          "Concurrence of a two-qubit density matrix", py::arg("rho"));
    m.def("concurrence_eigen_route", &concurrence_eigen_route, py::arg("rho"));
    m.def("two_qubit_restrict",
          [](const Mat& rho_m, int d1, int d2) {
              const TwoQubitState q = two_qubit_restrict(rho_m, d1, d2);
              return py::make_tuple(Eigen::Matrix4cd(q.rho), q.retained_probability);
          },
          py::arg("rho_m"), py::arg("dim1"), py::arg("dim2"));

    m.def("analytic_concurrence", [](cplx a, cplx b, cplx c, cplx d) { return analytic_concurrence(pure(a, b, c, d)); },
          py::arg("c00"), py::arg("c01"), py::arg("c10"), py::arg("c11"));
    m.def("analytic_visibility", [](cplx a, cplx b, cplx c, cplx d) { return analytic_visibility(pure(a, b, c, d)); },
          py::arg("c00"), py::arg("c01"), py::arg("c10"), py::arg("c11"));
    m.def("analytic_intensity", [](cplx a, cplx b, cplx c, cplx d) { return analytic_intensity(pure(a, b, c, d)); },
          py::arg("c00"), py::arg("c01"), py::arg("c10"), py::arg("c11"));
    m.def("visibility_from_concurrence", &visibility_from_concurrence, py::arg("C"));

    m.def("visibility_fit",
          [](const std::vector<double>& t, const std::vector<double>& i, double omega) {
              return fit_dict(visibility(t, i, omega));
          },
          py::arg("t"), py::arg("intensity"), py::arg("omega"));

    m.def("run_write", [](const std::string& cfg) { return write_result(config_from(cfg)); },
          "Heralding stage: occupations, C(t_P) and herald probability per checkpoint", py::arg("config_json") = "");
    m.def("fringe_scan", [](const std::string& cfg) { return fringe_result(config_from(cfg)); },
          "Readout fringes over the configured readout-time grid", py::arg("config_json") = "");
}
