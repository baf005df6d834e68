#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmtlab/clt_theory.hpp"
#include "rmtlab/config.hpp"
#include "rmtlab/dbm.hpp"
#include "rmtlab/dyson.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/girko.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/test_functions.hpp"

namespace py = pybind11;
using namespace rmtlab;

namespace {

// Config documents cross the boundary as JSON text; the Python wrapper converts.
Json parse(const std::string& s) { return Json::parse(s); }

TestFunction function_from_json(const std::string& s) { return make_test_function(function_spec_from_json(parse(s))); }

EntryDistribution distribution(const std::string& kind, double param) {
    return EntryDistribution::from_name(kind, param);
}

py::dict breakdown(const CovarianceBreakdown& b) {
    py::dict d;
    d["gradient_term"] = b.gradient_term;
    d["h_half_term"] = b.h_half_term;
    d["kappa4_term"] = b.kappa4_term;
    d["total"] = b.total;
    d["kappa4_coefficient_g"] = b.kappa4_coefficient_g;
    d["kappa4_coefficient_f"] = b.kappa4_coefficient_f;
    d["drift"] = b.drift;
    return d;
}

} // namespace

PYBIND11_MODULE(_rmtlab, m) {
    m.doc() = "Linear eigenvalue statistics of non-Hermitian random matrices";
    m.attr("__version__") = code_version();

    py::register_exception<Error>(m, "RmtlabError");
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);

    py::class_<DysonPoint>(m, "DysonPoint")
        .def_readonly("z", &DysonPoint::z)
        .def_readonly("w", &DysonPoint::w)
        .def_readonly("m", &DysonPoint::m)
        .def_readonly("u", &DysonPoint::u)
        .def_readonly("beta", &DysonPoint::beta)
        .def_readonly("beta_star", &DysonPoint::beta_star)
        .def_readonly("m_prime", &DysonPoint::m_prime)
        .def_readonly("residual", &DysonPoint::residual)
        .def("__repr__", [](const DysonPoint& p) {
            return "DysonPoint(m=" + std::to_string(p.m.real()) + "+" + std::to_string(p.m.imag()) + "j)";
        });

    m.def("solve_m", &solve_m, py::arg("z"), py::arg("w"));
    m.def("solve_m_real", &solve_m_real, py::arg("z"), py::arg("E"));
    m.def("density_at", &density_at, py::arg("z"), py::arg("E"));
    m.def("quantile", &quantile, py::arg("z"), py::arg("n"), py::arg("i"));

    m.def("theta_closed", &theta_closed, py::arg("z1"), py::arg("z2"));
    m.def("v_kernel", py::overload_cast<Complex, Complex, double, double>(&v_kernel), py::arg("z1"), py::arg("z2"),
          py::arg("eta1"), py::arg("eta2"));
    m.def("u_kernel", py::overload_cast<Complex, double>(&u_kernel), py::arg("z"), py::arg("eta"));
    m.def("u_kernel_integral", &u_kernel_integral, py::arg("z"));

    py::class_<TestFunction>(m, "TestFunction")
        .def_property_readonly("label", &TestFunction::label)
        .def_property_readonly("support_radius", &TestFunction::support_radius)
        .def("__call__", &TestFunction::value, py::arg("z"))
        .def("laplacian", &TestFunction::laplacian, py::arg("z"));
    m.def("_function", &function_from_json, py::arg("spec_json"));

    m.def(
        "_covariance",
        [](const std::string& g, const std::string& f, double kappa4) {
            return breakdown(covariance_functional(function_from_json(g), function_from_json(f), kappa4));
        },
        py::arg("g_json"), py::arg("f_json"), py::arg("kappa4"));
    m.def(
        "_expectation",
        [](const std::string& f, double kappa4, std::size_t n) {
            const ExpectationPrediction p = expectation_correction(function_from_json(f), kappa4, n);
            py::dict d;
            d["leading"] = p.leading;
            d["correction"] = p.correction;
            return d;
        },
        py::arg("f_json"), py::arg("kappa4"), py::arg("n"));

    m.def(
        "sample_matrix",
        [](std::size_t n, std::uint64_t seed, const std::string& kind, double param) {
            return sample_matrix(distribution(kind, param), n, seed).entries;
        },
        py::arg("n"), py::arg("seed"), py::arg("kind") = "ginibre", py::arg("param") = 0.0);
    m.def("kappa4", [](const std::string& kind, double param) { return distribution(kind, param).kappa4(); },
          py::arg("kind"), py::arg("param") = 0.0);
    m.def(
        "eigenvalues", [](const CMatrix& x) { return nonhermitian_eigenvalues(x).sigmas; }, py::arg("x"));
    m.def(
        "singular_values", [](const CMatrix& x, Complex z) { return hermitized_spectrum(x, z, false).lambdas; },
        py::arg("x"), py::arg("z") = Complex(0.0));
    m.def(
        "overlap_matrix",
        [](const CMatrix& x, Complex z1, Complex z2, std::size_t k) {
            return overlap_matrix(hermitized_spectrum(x, z1, true), hermitized_spectrum(x, z2, true), k);
        },
        py::arg("x"), py::arg("z1"), py::arg("z2"), py::arg("k"));
    m.def(
        "independence_statistic",
        [](const CMatrix& x, Complex z, double eta, double omega_hat) {
            return independence_statistic(hermitized_spectrum(x, z, false), eta, omega_hat);
        },
        py::arg("x"), py::arg("z"), py::arg("eta"), py::arg("omega_hat"));

    m.def(
        "girko_reconstruct",
        [](const CMatrix& x, const TestFunction& f, std::size_t grid_r, std::size_t grid_theta, double T) {
            MatrixSample s;
            s.n = static_cast<std::size_t>(x.rows());
            s.entries = x;
            GirkoConfig cfg;
            cfg.T = T;
            cfg.zgrid.n_r = grid_r;
            cfg.zgrid.n_theta = grid_theta;
            const GirkoReport r = girko_reconstruct(s, f, cfg);
            py::dict d;
            d["reconstructed"] = r.reconstructed;
            d["direct"] = r.direct;
            d["relative_error"] = r.relative_error();
            d["J_T"] = r.regimes.J_T;
            d["I_0_eta0"] = r.regimes.I_0_eta0;
            d["I_eta0_etac"] = r.regimes.I_eta0_etac;
            d["I_etac_T"] = r.regimes.I_etac_T;
            d["eta0"] = r.eta0;
            d["etac"] = r.etac;
            return d;
        },
        py::arg("x"), py::arg("f"), py::arg("grid_r") = 64, py::arg("grid_theta") = 128, py::arg("T") = 1e6);

    m.def("dbm_drift", &dbm_drift, py::arg("points"), py::arg("n"));
    m.def(
        "dbm_matrix_flow",
        [](const CMatrix& x, std::vector<Complex> zs, double dt, double t_final, std::size_t record_every,
           std::uint64_t seed) {
            DbmConfig cfg;
            cfg.n = static_cast<std::size_t>(x.rows());
            cfg.dt = dt;
            cfg.t_final = t_final;
            cfg.record_every = record_every;
            const Trajectories t = run_coupled(cfg, {}, {DriverMode::matrix_flow, 0, seed}, MatrixFlowSetup{x, zs});
            py::dict d;
            d["times"] = t.times;
            d["records"] = t.records;
            d["truth"] = t.truth;
            return d;
        },
        py::arg("x"), py::arg("zs"), py::arg("dt"), py::arg("t_final"), py::arg("record_every") = 1,
        py::arg("seed") = 0);

    m.def(
        "_run_clt",
        [](const std::string& doc) {
            const ExperimentConfig cfg = parse_experiment(parse(doc));
            CltRun run;
            {
                py::gil_scoped_release release;
                run = run_clt_experiment(cfg);
            }
            return clt_run_to_json(run).dump();
        },
        py::arg("config_json"));
    m.def("config_hash", [](const std::string& doc) { return config_hash(parse(doc)); }, py::arg("config_json"));
    m.def("derive_seed", &derive_seed, py::arg("base_seed"), py::arg("index"));
    m.def("thread_count", &thread_count);
}
