#include "sdaerk/convergence.hpp"
#include "sdaerk/errors.hpp"
#include "sdaerk/families.hpp"
#include "sdaerk/json_io.hpp"
#include "sdaerk/noise.hpp"
#include "sdaerk/solver.hpp"
#include "sdaerk/stability.hpp"
#include "sdaerk/tableau.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace sdaerk;

namespace {

Sign sign_from_string(const std::string& s) {
    if (s == "upper") return Sign::upper;
    if (s == "lower") return Sign::lower;
    throw UnknownParameter("sign must be 'upper' or 'lower'");
}

StrongOrder order_from_double(double order) {
    if (order == 0.5) return StrongOrder::half;
    if (order == 1.0) return StrongOrder::one;
    throw BadRange("order must be 0.5 or 1.0");
}

std::vector<std::vector<double>> matrix_to_lists(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(m.cols()));
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

py::dict point_dict(const TestPoint& pt) {
    py::dict d;
    d["hhat_re"] = pt.hhat.real();
    d["hhat_im"] = pt.hhat.imag();
    d["k_re"] = pt.k.real();
    d["k_im"] = pt.k.imag();
    return d;
}

py::dict stats_dict(const StepStats& s) {
    py::dict d;
    d["f_evals"] = s.f_evals;
    d["g_evals"] = s.g_evals;
    d["newton_iters"] = s.newton_iters;
    d["lu_factorizations"] = s.lu_factorizations;
    return d;
}

StudyProblem build_study(const std::string& problem, double lambda, double mu,
                         double x0, double c, double t0, double T) {
    if (problem == "gbm") return make_gbm_study(lambda, mu, x0, t0, T);
    if (problem == "reduced-sdae")
        return make_reduced_sdae_study(lambda, mu, c, x0, t0, T);
    throw BadRange("problem must be 'gbm' or 'reduced-sdae'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stiffly accurate stochastic Runge-Kutta methods for index-1 "
              "SDAEs with scalar noise";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = "[" + e.code() + "] " + e.what();
            if (e.kind() == ErrorKind::validation)
                PyErr_SetString(PyExc_ValueError, msg.c_str());
            else
                PyErr_SetString(PyExc_ArithmeticError, msg.c_str());
        }
    });

    py::class_<SrkTableau>(m, "Tableau")
        .def_property_readonly("s", &SrkTableau::stages)
        .def_property_readonly(
            "A", [](const SrkTableau& t) { return matrix_to_lists(t.A()); })
        .def_property_readonly(
            "B1", [](const SrkTableau& t) { return matrix_to_lists(t.B(1)); })
        .def_property_readonly(
            "B2", [](const SrkTableau& t) { return matrix_to_lists(t.B(2)); })
        .def_property_readonly(
            "B3", [](const SrkTableau& t) { return matrix_to_lists(t.B(3)); })
        .def_property_readonly("c",
                               [](const SrkTableau& t) {
                                   return std::vector<double>(
                                       t.c().data(), t.c().data() + t.stages());
                               })
        .def("__eq__",
             [](const SrkTableau& a, const SrkTableau& b) { return a == b; })
        .def("__hash__", &SrkTableau::hash)
        .def("to_json",
             [](const SrkTableau& t) { return tableau_to_json(t).dump(); });

    m.def("tableau_from_json", [](const std::string& text) {
        return tableau_from_json(nlohmann::json::parse(text));
    });

    m.def(
        "make_tableau",
        [](const std::string& family, const Params& params,
           const std::string& sign) {
            FamilySpec spec;
            spec.family = family_from_name(family);
            spec.params = params;
            spec.sign = sign_from_string(sign);
            return make_tableau(spec);
        },
        py::arg("family"), py::arg("params"), py::arg("sign") = "upper");

    m.def("default_params", [](const std::string& family) {
        return default_spec(family_from_name(family)).params;
    });

    m.def("family_names", [] {
        std::vector<std::string> names;
        for (FamilyId id : all_families()) names.emplace_back(family_name(id));
        return names;
    });

    m.def(
        "class_v_solve",
        [](double b32_1, double b33_3, double lo, double hi, double tol) {
            RootSearch search;
            search.lo = lo;
            search.hi = hi;
            search.tol = tol;
            return class_v_solve(b32_1, b33_3, search);
        },
        py::arg("b32_1"), py::arg("b33_3"), py::arg("lo") = -3.0,
        py::arg("hi") = 3.0, py::arg("tol") = 1e-12);

    m.def("validate_structure", [](const SrkTableau& t) {
        const StructureReport r = validate_structure(t);
        py::dict d;
        d["diagonally_implicit"] = r.diagonally_implicit;
        d["noise_explicit"] = r.noise_explicit;
        d["sdae_applicable"] = r.sdae_applicable;
        d["sdae_reason"] = r.sdae_reason;
        d["explicit_first_stage"] = r.explicit_first_stage;
        d["singly_diagonal"] = r.singly_diagonal;
        return d;
    });

    m.def(
        "order_residuals",
        [](const SrkTableau& t, double order) {
            const OrderReport r = order_residuals(t, order_from_double(order));
            py::dict d;
            d["order_tested"] = order;
            d["residuals"] = r.residuals;
            d["max_residual"] = r.max_residual;
            if (r.lambda) d["lambda"] = *r.lambda;
            return d;
        },
        py::arg("tableau"), py::arg("order"));

    m.def(
        "effective_order",
        [](const SrkTableau& t, double tol) {
            return std::string(
                order_class_name(effective_order(t, tol).order));
        },
        py::arg("tableau"), py::arg("tol") = 1e-12);

    m.def("sde_ms_stable", &sde_ms_stable, py::arg("lam"), py::arg("mu"));
    m.def("gaussian_moment", &gaussian_moment, py::arg("n"));

    m.def(
        "response_coefficients",
        [](const SrkTableau& t, Complex hhat, Complex k) {
            return response_polynomial(t, TestPoint{hhat, k}).coeffs();
        },
        py::arg("tableau"), py::arg("hhat"), py::arg("k"));

    m.def(
        "ms_gain",
        [](const SrkTableau& t, Complex hhat, Complex k) {
            return ms_gain(t, TestPoint{hhat, k});
        },
        py::arg("tableau"), py::arg("hhat"), py::arg("k"));

    m.def(
        "closed_form_gain",
        [](const std::string& scheme, const Params& params, Complex hhat,
           Complex k) {
            return closed_form_gain(closed_form_from_name(scheme), params,
                                    TestPoint{hhat, k});
        },
        py::arg("scheme"), py::arg("params"), py::arg("hhat"), py::arg("k"));

    m.def(
        "region_grid",
        [](const SrkTableau& t, double hhat_min, double hhat_max,
           double ksq_min, double ksq_max, int res) {
            const StabilityGrid grid = region_grid(
                t, {hhat_min, hhat_max}, {ksq_min, ksq_max}, {res, res});
            py::dict d;
            d["hhat_axis"] = grid.hhat_axis;
            d["ksq_axis"] = grid.ksq_axis;
            d["gain"] = grid.gain;
            d["stable"] = grid.stable_mask;
            return d;
        },
        py::arg("tableau"), py::arg("hhat_min") = -8.0,
        py::arg("hhat_max") = 0.0, py::arg("ksq_min") = 0.0,
        py::arg("ksq_max") = 16.0, py::arg("res") = 400);

    m.def(
        "a_stability_probe",
        [](const SrkTableau& t, int ray_density, int radial_density,
           int complex_samples, double margin) {
            ProbeSampler sampler;
            sampler.ray_density = ray_density;
            sampler.radial_density = radial_density;
            sampler.complex_samples = complex_samples;
            sampler.margin = margin;
            const ProbeReport r = a_stability_probe(t, sampler);
            py::dict d;
            d["verdict"] = r.pass ? "pass" : "counterexample";
            d["max_gain"] = r.max_gain;
            d["worst_point"] = point_dict(r.worst_point);
            d["samples"] = r.samples;
            d["skipped_singular"] = r.skipped_singular;
            return d;
        },
        py::arg("tableau"), py::arg("ray_density") = 256,
        py::arg("radial_density") = 512, py::arg("complex_samples") = 128,
        py::arg("margin") = 0.01);

    m.def(
        "simulate",
        [](const SrkTableau& t, const std::string& problem, double lambda,
           double mu, double x0, double c, double t0, double T, int steps,
           std::uint64_t seed, bool fsal) {
            const StudyProblem sp =
                build_study(problem, lambda, mu, x0, c, t0, T);
            NoiseStream stream(seed);
            const Trajectory traj =
                simulate_path(sp.problem, t, steps, stream, {}, fsal);
            py::dict d;
            d["times"] = traj.times;
            std::vector<std::vector<double>> states;
            states.reserve(traj.states.size());
            for (const Eigen::VectorXd& s : traj.states)
                states.emplace_back(s.data(), s.data() + s.size());
            d["states"] = states;
            d["stats"] = stats_dict(traj.totals());
            return d;
        },
        py::arg("tableau"), py::arg("problem") = "gbm", py::arg("lam") = -1.0,
        py::arg("mu") = 0.5, py::arg("x0") = 1.0, py::arg("c") = 0.5,
        py::arg("t0") = 0.0, py::arg("T") = 1.0, py::arg("steps") = 128,
        py::arg("seed") = 0, py::arg("fsal") = true);

    m.def(
        "strong_order",
        [](const SrkTableau& t, const std::string& problem, double lambda,
           double mu, double x0, double c, double t0, double T, int paths,
           std::uint64_t seed, int hexp_coarse, int hexp_fine) {
            const StudyProblem sp =
                build_study(problem, lambda, mu, x0, c, t0, T);
            const auto h = dyadic_h_list(T - t0, hexp_coarse, hexp_fine);
            const ConvergenceStudy study =
                strong_order_estimate(sp, t, h, paths, seed);
            py::dict d;
            d["h"] = study.h_list;
            d["errors"] = study.errors;
            d["slope"] = study.slope;
            d["n_paths"] = study.n_paths;
            d["seed"] = study.seed;
            return d;
        },
        py::arg("tableau"), py::arg("problem") = "gbm", py::arg("lam") = -1.0,
        py::arg("mu") = 0.5, py::arg("x0") = 1.0, py::arg("c") = 0.5,
        py::arg("t0") = 0.0, py::arg("T") = 1.0, py::arg("paths") = 200,
        py::arg("seed") = 0, py::arg("hexp_coarse") = 4,
        py::arg("hexp_fine") = 7);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
