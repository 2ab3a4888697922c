#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "impulse_floquet/descriptor.hpp"
#include "impulse_floquet/errors.hpp"
#include "impulse_floquet/harness.hpp"
#include "impulse_floquet/report.hpp"
#include "impulse_floquet/simulate.hpp"

namespace py = pybind11;
using namespace impulse_floquet;

namespace {

// Owned by the module; set once at import.
PyObject* descriptor_error_type = nullptr;
PyObject* integration_error_type = nullptr;

Tolerances integration(double tol_abs, double tol_rel) {
    Tolerances t;
    t.abs = tol_abs;
    t.rel = tol_rel;
    return t;
}

CriteriaTolerances criteria_tolerances(double tol_strict) {
    CriteriaTolerances t;
    t.strict = tol_strict;
    return t;
}

harness::ConstraintMode mode_from(const std::string& name) {
    const auto mode = harness::parse_mode(name);
    if (!mode) throw py::value_error("unknown generator mode: " + name);
    return *mode;
}

harness::GeneratorSpec spec_from(const std::string& mode, std::uint64_t seed, double margin) {
    harness::GeneratorSpec spec;
    spec.mode = mode_from(mode);
    spec.seed = seed;
    spec.margin = margin;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stability analysis of periodic planar Hamiltonian systems with impulse effects";

    const auto& descriptor_error = py::register_exception<DescriptorError>(m, "DescriptorError", PyExc_ValueError);
    const auto& integration_error =
        py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    descriptor_error_type = descriptor_error.ptr();
    integration_error_type = integration_error.ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const nlohmann::json::exception& e) {
            PyErr_SetString(descriptor_error_type, e.what());
        } catch (const EvaluationError& e) {
            PyErr_SetString(integration_error_type, e.what());
        }
    });

    m.def("validate", [](const std::string& d) { return system_to_json(parse_descriptor(d)).dump(); },
          py::arg("descriptor"));

    m.def(
        "analyze",
        [](const std::string& d, double tol_abs, double tol_rel, double tol_strict) {
            const auto sys = parse_descriptor(d);
            py::gil_scoped_release release;
            const auto mono = monodromy(sys, integration(tol_abs, tol_rel));
            return analysis_report(mono, classify(mono), evaluate_all(sys, criteria_tolerances(tol_strict))).dump();
        },
        py::arg("descriptor"), py::arg("tol_abs") = Tolerances{}.abs, py::arg("tol_rel") = Tolerances{}.rel,
        py::arg("tol_strict") = CriteriaTolerances{}.strict);

    m.def(
        "monodromy",
        [](const std::string& d, double tol_abs, double tol_rel) {
            const auto sys = parse_descriptor(d);
            py::gil_scoped_release release;
            return to_json(monodromy(sys, integration(tol_abs, tol_rel))).dump();
        },
        py::arg("descriptor"), py::arg("tol_abs") = Tolerances{}.abs, py::arg("tol_rel") = Tolerances{}.rel);

    m.def(
        "criteria",
        [](const std::string& d, double tol_strict) {
            return to_json(evaluate_all(parse_descriptor(d), criteria_tolerances(tol_strict))).dump();
        },
        py::arg("descriptor"), py::arg("tol_strict") = CriteriaTolerances{}.strict);

    m.def("floquet_multipliers", &floquet_multipliers, py::arg("trace"), py::arg("b"));

    m.def(
        "lyapunov_lhs",
        [](const std::string& d, double t1, double t2, double t0) { return lyapunov_lhs(parse_descriptor(d), t1, t2, t0); },
        py::arg("descriptor"), py::arg("t1"), py::arg("t2"), py::arg("t0"));

    m.def(
        "disconjugacy",
        [](const std::string& d, double t1, double t2) {
            const auto sys = parse_descriptor(d);
            py::gil_scoped_release release;
            const auto test = disconjugacy_test(sys, t1, t2);
            const auto oracle = disconjugacy_oracle(sys, t1, t2);
            return nlohmann::json{{"test", to_json(test)}, {"oracle", to_json(oracle)}}.dump();
        },
        py::arg("descriptor"), py::arg("t1"), py::arg("t2"));

    m.def(
        "simulate",
        [](const std::string& d, int periods, int samples, double x0, double u0) {
            const auto rows = simulate(parse_descriptor(d), periods, samples, {x0, u0});
            py::list out;
            for (const auto& r : rows) out.append(py::make_tuple(r.t, r.x, r.u, r.z, r.v, r.finite));
            return out;
        },
        py::arg("descriptor"), py::arg("periods"), py::arg("samples") = 32, py::arg("x0") = 1.0,
        py::arg("u0") = 0.0);

    m.def(
        "generate",
        [](const std::string& mode, std::uint64_t seed, double margin) {
            return system_to_json(harness::generate(spec_from(mode, seed, margin))).dump();
        },
        py::arg("mode") = "unconstrained", py::arg("seed") = 0, py::arg("margin") = 1e-3);

    m.def(
        "soundness_sweep",
        [](const std::string& mode, std::size_t n, std::uint64_t seed, double margin, unsigned workers,
           bool records) {
            const auto spec = spec_from(mode, seed, margin);
            harness::SweepOptions opt;
            opt.workers = workers;
            py::gil_scoped_release release;
            return harness::to_json(harness::soundness_sweep(spec, n, opt), records).dump();
        },
        py::arg("mode"), py::arg("n"), py::arg("seed") = 0, py::arg("margin") = 1e-3, py::arg("workers") = 1,
        py::arg("records") = false);

    m.def(
        "lyapunov_sweep",
        [](std::size_t n, std::uint64_t seed, unsigned workers) {
            harness::GeneratorSpec spec;
            spec.seed = seed;
            harness::LyapunovSweepOptions opt;
            opt.workers = workers;
            py::gil_scoped_release release;
            return harness::to_json(harness::lyapunov_sweep(spec, n, opt)).dump();
        },
        py::arg("n"), py::arg("seed") = 0, py::arg("workers") = 1);
}
