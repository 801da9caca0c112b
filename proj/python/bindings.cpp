/*
 Copyright 2026 The reachkit Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reachkit/harness.hpp"

namespace py = pybind11;
using namespace reachkit;

namespace {

OpenLoopPolicy policy(const VectorXd& U) { return OpenLoopPolicy{U}; }

py::list value_arrays(const ValueGrid& g) {
    py::list out;
    std::vector<py::ssize_t> shape(g.counts.begin(), g.counts.end());
    for (const auto& v : g.values) {
        py::array_t<double> a(shape);
        std::copy(v.begin(), v.end(), a.mutable_data());
        out.append(a);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_reachkit, m) {
    m.doc() = "Stochastic reach-avoid lower bounds for LTI systems with Gaussian disturbances";
    m.attr("__version__") = version();

    py::register_exception<InfeasibleInput>(m, "InfeasibleInput", PyExc_ValueError);
    py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_ArithmeticError);
    py::register_exception<DpGridTooLarge>(m, "DpGridTooLarge", PyExc_MemoryError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

    py::class_<Box>(m, "Box")
        .def(py::init<VectorXd, VectorXd>(), py::arg("lower"), py::arg("upper"))
        .def_static("cube", &Box::cube, py::arg("dim"), py::arg("lo"), py::arg("hi"))
        .def_static("whole", &Box::whole, py::arg("dim"))
        .def_property_readonly("lower", &Box::lower)
        .def_property_readonly("upper", &Box::upper)
        .def_property_readonly("dim", &Box::dim)
        .def("empty", &Box::empty)
        .def("contains", [](const Box& b, const VectorXd& x) { return b.contains(x); }, py::arg("x"))
        .def("__repr__", [](const Box& b) { return "Box(dim=" + std::to_string(b.dim()) + ")"; });

    py::class_<DisturbanceModel>(m, "DisturbanceModel")
        .def_static("gaussian", &DisturbanceModel::gaussian, py::arg("mean"), py::arg("covariance"))
        .def("is_gaussian", &DisturbanceModel::is_gaussian)
        .def_property_readonly("dim", &DisturbanceModel::dim);

    py::class_<LtiSystem>(m, "LtiSystem")
        .def(py::init<MatrixXd, MatrixXd, DisturbanceModel, Box>(), py::arg("A"), py::arg("B"),
             py::arg("disturbance"), py::arg("input_box"))
        .def_property_readonly("A", &LtiSystem::A)
        .def_property_readonly("B", &LtiSystem::B)
        .def_property_readonly("input_box", &LtiSystem::input_box)
        .def_property_readonly("state_dim", &LtiSystem::state_dim)
        .def_property_readonly("input_dim", &LtiSystem::input_dim);

    m.def(
        "chain_of_integrators",
        [](int n, double sampling) {
            const auto maps = chain_of_integrators(n, sampling);
            return py::make_tuple(maps.A, maps.B);
        },
        py::arg("n"), py::arg("sampling"), "Returns (A, B) of the n-state chain of integrators.");

    py::class_<ReachAvoidQuery>(m, "ReachAvoidQuery")
        .def(py::init([](LtiSystem sys, Box safe, Box target, int horizon, VectorXd x0) {
                 ReachAvoidQuery q{std::move(sys), std::move(safe), std::move(target), horizon, std::move(x0)};
                 q.validate();
                 return q;
             }),
             py::arg("system"), py::arg("safe"), py::arg("target"), py::arg("horizon"), py::arg("x0"))
        .def_readonly("system", &ReachAvoidQuery::system)
        .def_readonly("safe", &ReachAvoidQuery::safe)
        .def_readonly("target", &ReachAvoidQuery::target)
        .def_readonly("horizon", &ReachAvoidQuery::horizon)
        .def_readwrite("x0", &ReachAvoidQuery::x0);

    m.def(
        "concatenated_dynamics",
        [](const MatrixXd& A, const MatrixXd& B, int N) {
            const auto c = build_concatenated(A, B, N);
            return py::make_tuple(c.A_bar, c.H_bar, c.G_bar);
        },
        py::arg("A"), py::arg("B"), py::arg("horizon"), "Returns (A_bar, H_bar, G_bar).");

    py::class_<QuadConfig>(m, "QuadConfig")
        .def(py::init<>())
        .def_readwrite("eps", &QuadConfig::eps)
        .def_readwrite("max_samples", &QuadConfig::max_samples)
        .def_readwrite("shifts", &QuadConfig::shifts)
        .def_readwrite("seed", &QuadConfig::seed);

    py::class_<QuadResult>(m, "QuadResult")
        .def_readonly("p", &QuadResult::p)
        .def_readonly("err_est", &QuadResult::err_est)
        .def_readonly("samples_used", &QuadResult::samples_used)
        .def("__repr__", [](const QuadResult& r) {
            return "QuadResult(p=" + std::to_string(r.p) + ", err_est=" + std::to_string(r.err_est) + ")";
        });

    m.def(
        "mvn_box_probability",
        [](const VectorXd& mean, const MatrixXd& cov, const Box& box, const QuadConfig& cfg) {
            return mvn_box_probability(GaussianVector{mean, cov}, box, cfg);
        },
        py::arg("mean"), py::arg("covariance"), py::arg("box"), py::arg("cfg") = QuadConfig{});

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("p_hat", &McEstimate::p_hat)
        .def_readonly("half_width_95", &McEstimate::half_width_95)
        .def_readonly("n_samples", &McEstimate::n_samples);

    m.def(
        "reach_avoid_probability",
        [](const ReachAvoidQuery& q, const VectorXd& U, const QuadConfig& cfg) {
            return reach_avoid_probability(q, policy(U), cfg);
        },
        py::arg("query"), py::arg("U"), py::arg("cfg") = QuadConfig{});
    m.def(
        "reach_avoid_probability_mc",
        [](const ReachAvoidQuery& q, const VectorXd& U, std::int64_t n, std::uint64_t seed, int threads) {
            py::gil_scoped_release release;
            return reach_avoid_probability_mc(q, policy(U), n, seed, threads);
        },
        py::arg("query"), py::arg("U"), py::arg("n_samples"), py::arg("seed"), py::arg("threads") = 1);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_property(
            "method", [](const SolverConfig& c) { return to_string(c.method); },
            [](SolverConfig& c, const std::string& s) { c.method = parse_solver_method(s); })
        .def_readwrite("eps_clamp", &SolverConfig::eps_clamp)
        .def_readwrite("initial_mesh", &SolverConfig::initial_mesh)
        .def_readwrite("mesh_tol", &SolverConfig::mesh_tol)
        .def_readwrite("max_evals", &SolverConfig::max_evals)
        .def_readwrite("expansion", &SolverConfig::expansion)
        .def_readwrite("contraction", &SolverConfig::contraction)
        .def_readwrite("fd_step", &SolverConfig::fd_step)
        .def_readwrite("grad_tol", &SolverConfig::grad_tol)
        .def_readwrite("heuristic_start", &SolverConfig::heuristic_start)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("search_points_per_shift", &SolverConfig::search_points_per_shift);

    py::class_<SolveResult>(m, "SolveResult")
        .def_property_readonly("U_star", [](const SolveResult& r) { return r.U_star.inputs; })
        .def_property_readonly("p_star", [](const SolveResult& r) { return r.p_star.p; })
        .def_property_readonly("err_est", [](const SolveResult& r) { return r.p_star.err_est; })
        .def_readonly("evals", &SolveResult::evals)
        .def_readonly("wall_time", &SolveResult::wall_time)
        .def_readonly("converged", &SolveResult::converged)
        .def_property_readonly("trace", [](const SolveResult& r) {
            std::vector<std::pair<int, double>> t;
            for (const auto& p : r.trace) t.emplace_back(p.eval, p.best);
            return t;
        });

    m.def(
        "solve",
        [](const ReachAvoidQuery& q, const SolverConfig& cfg, const QuadConfig& quad) {
            py::gil_scoped_release release;
            return solve(q, cfg, quad);
        },
        py::arg("query"), py::arg("cfg") = SolverConfig{}, py::arg("quad_cfg") = QuadConfig{});
    m.def("clamped_log", &clamped_log, py::arg("p"), py::arg("eps_clamp"));
    m.def(
        "initial_guess", [](const ReachAvoidQuery& q, bool heuristic) { return initial_guess(q, heuristic).inputs; },
        py::arg("query"), py::arg("heuristic") = false);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("state_spacing", &GridSpec::state_spacing)
        .def_readwrite("input_spacing", &GridSpec::input_spacing)
        .def_readwrite("disturbance_box", &GridSpec::disturbance_box)
        .def_readwrite("disturbance_spacing", &GridSpec::disturbance_spacing)
        .def_readwrite("interpolate", &GridSpec::interpolate);

    py::class_<ValueGrid>(m, "ValueGrid")
        .def_readonly("horizon", &ValueGrid::horizon)
        .def_readonly("spacing", &ValueGrid::spacing)
        .def_readonly("lower", &ValueGrid::lower)
        .def_readonly("upper", &ValueGrid::upper)
        .def_property_readonly("values", &value_arrays, "V_0..V_N as arrays shaped like the state grid")
        .def("value_at", &dp_value_at, py::arg("x0"));

    m.def(
        "dp_solve",
        [](const ReachAvoidQuery& q, const GridSpec& g, int threads) {
            py::gil_scoped_release release;
            return dp_solve(q, g, threads);
        },
        py::arg("query"), py::arg("grid"), py::arg("threads") = 1);
    m.def("dp_node_values", &dp_node_values, py::arg("query"), py::arg("grid"));

    m.def(
        "solve_problem_json",
        [](const std::string& doc, const std::string& method, int threads) {
            const Problem p = parse_problem(nlohmann::json::parse(doc));
            const Method meth = parse_method(method);
            ResultRecord r;
            {
                py::gil_scoped_release release;
                r = cmd_solve(p, meth, threads);
            }
            return record_to_json(r, p).dump();
        },
        py::arg("document"), py::arg("method") = "ds", py::arg("threads") = 1,
        "Parses a problem document (JSON text), solves it and returns the result record as JSON text.");
}
