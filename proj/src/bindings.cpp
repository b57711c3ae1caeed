#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blowup/cli.hpp"
#include "blowup/config.hpp"
#include "blowup/spectral.hpp"

namespace py = pybind11;
using namespace blowup;

namespace {

py::dict manifest_dict(const RunManifest& m) {
    py::dict d;
    d["subcommand"] = m.subcommand;
    d["version"] = m.version;
    d["passed"] = m.passed();
    d["wall_time"] = m.wall_time;
    d["artifacts"] = m.artifacts;
    py::list assertions;
    for (const auto& a : m.assertions) {
        py::dict e;
        e["name"] = a.name;
        e["pass"] = a.pass;
        e["measured"] = a.measured;
        e["relation"] = a.relation;
        e["threshold"] = a.threshold;
        assertions.append(e);
    }
    d["assertions"] = assertions;
    py::dict summary;
    for (const auto& [k, v] : m.summary) summary[py::str(k)] = v;
    d["summary"] = summary;
    return d;
}

RunManifest run_from_python(const std::string& subcommand, const std::map<std::string, std::string>& values,
                            const std::string& out, std::uint64_t seed, int jobs) {
    Config cfg = default_config(subcommand);
    for (const auto& [k, v] : values) cfg.set(k, v);
    RunContext ctx;
    ctx.out_dir = out;
    ctx.seed = seed;
    ctx.jobs = jobs;
    py::gil_scoped_release release;
    return run(subcommand, cfg, ctx);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core of the self-similar blowup lab";
    m.attr("__version__") = BLOWUP_VERSION;

    // translators are tried newest first, so the base class goes first
    py::register_exception<Error>(m, "LabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);

    m.def("rgamma", [](cplx z) { return rgamma(z); }, py::arg("z"));
    m.def("hyp2f1", &hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));
    m.def("mode_indicator", [](cplx lambda, int l) { return mode_indicator(SpectralParams(lambda, l)); },
          py::arg("lam"), py::arg("l"));
    m.def("phi0_closed", &phi0_closed, py::arg("l"), py::arg("z"));
    m.def("phi0_series", &phi0_series, py::arg("l"), py::arg("z"));
    m.def("multiplicity_solution", &multiplicity_solution, py::arg("rho"), py::arg("c0") = 0.0,
          py::arg("derivative") = 0);

    m.def("subcommands", &subcommands);
    m.def("describe_schema", &describe_schema, py::arg("subcommand"));
    m.def(
        "run",
        [](const std::string& subcommand, const std::map<std::string, std::string>& config, const std::string& out,
           std::uint64_t seed, int jobs) { return manifest_dict(run_from_python(subcommand, config, out, seed, jobs)); },
        py::arg("subcommand"), py::arg("config") = std::map<std::string, std::string>{}, py::arg("out") = ".",
        py::arg("seed") = RunContext{}.seed, py::arg("jobs") = 1);
}
