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

#include "reachkit/problem.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "reachkit/random.hpp"

namespace reachkit {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing '") + key + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    fail(where, "expected a number");
}

double bound(const json& v, double if_null, const std::string& where) {
    if (v.is_null()) return if_null;
    return number(v, where);
}

/// Scalar (broadcast) or array of length dim.
VectorXd vector_of(const json& v, Eigen::Index dim, double if_null, const std::string& where) {
    VectorXd out(dim);
    if (v.is_array()) {
        if (static_cast<Eigen::Index>(v.size()) != dim) {
            fail(where, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
        }
        for (Eigen::Index i = 0; i < dim; ++i) out(i) = bound(v[i], if_null, where + "[" + std::to_string(i) + "]");
    } else {
        out.setConstant(bound(v, if_null, where));
    }
    return out;
}

MatrixXd matrix_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) fail(where, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::string rw = where + "[" + std::to_string(r) + "]";
        if (!v[r].is_array() || static_cast<Eigen::Index>(v[r].size()) != cols) fail(rw, "ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(v[r][c], rw);
    }
    return m;
}

Box box_of(const json& v, Eigen::Index dim, const std::string& where) {
    const VectorXd lo = vector_of(member(v, "lower", where), dim, -kInf, where + ".lower");
    const VectorXd hi = vector_of(member(v, "upper", where), dim, kInf, where + ".upper");
    try {
        return Box(lo, hi);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

template <class T>
void optional_field(const json& obj, const char* key, T& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        fail(where + "." + key, "wrong type");
    }
}

struct SystemParts {
    MatrixXd A;
    MatrixXd B;
};

SystemParts system_of(const json& v) {
    const std::string where = "system";
    if (!v.is_object()) fail(where, "expected an object");
    if (v.contains("chain_of_integrators")) {
        const json& c = v["chain_of_integrators"];
        const json& nj = member(c, "n", where + ".chain_of_integrators");
        if (!nj.is_number_integer() || nj.get<int>() < 1) fail(where + ".chain_of_integrators.n", "expected a positive integer");
        const double s = number(member(c, "sampling", where + ".chain_of_integrators"), where + ".chain_of_integrators.sampling");
        if (!(s > 0.0)) fail(where + ".chain_of_integrators.sampling", "must be positive");
        const auto maps = chain_of_integrators(nj.get<int>(), s);
        return {maps.A, maps.B};
    }
    SystemParts parts{matrix_of(member(v, "A", where), where + ".A"), matrix_of(member(v, "B", where), where + ".B")};
    if (parts.A.rows() != parts.A.cols()) fail(where + ".A", "must be square");
    if (parts.B.rows() != parts.A.rows()) fail(where + ".B", "row count must equal the state dimension");
    return parts;
}

DisturbanceModel disturbance_of(const json& v, Eigen::Index n) {
    const std::string where = "disturbance.gaussian";
    const json& g = member(v, "gaussian", "disturbance");
    VectorXd mean = VectorXd::Zero(n);
    if (g.contains("mean")) mean = vector_of(g["mean"], n, 0.0, where + ".mean");
    MatrixXd cov;
    if (g.contains("covariance")) {
        cov = matrix_of(g["covariance"], where + ".covariance");
        if (cov.rows() != n || cov.cols() != n) fail(where + ".covariance", "must be n x n");
    } else if (g.contains("covariance_diagonal")) {
        cov = vector_of(g["covariance_diagonal"], n, 0.0, where + ".covariance_diagonal").asDiagonal();
    } else if (g.contains("covariance_scale")) {
        cov = number(g["covariance_scale"], where + ".covariance_scale") * MatrixXd::Identity(n, n);
    } else {
        fail(where, "need one of covariance, covariance_diagonal, covariance_scale");
    }
    try {
        return DisturbanceModel::gaussian(mean, cov);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

std::vector<VectorXd> sweep_points(const json& s, Eigen::Index n) {
    const std::string where = "sweep";
    const VectorXd lo = vector_of(member(s, "lower", where), n, 0.0, where + ".lower");
    const VectorXd hi = vector_of(member(s, "upper", where), n, 0.0, where + ".upper");
    const double step = number(member(s, "spacing", where), where + ".spacing");
    if (!(step > 0.0)) fail(where + ".spacing", "must be positive");
    if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any()) fail(where, "bounds must be finite with lower <= upper");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n));
    std::int64_t total = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        counts[i] = static_cast<std::int64_t>(std::floor((hi(i) - lo(i)) / step + 1e-9)) + 1;
        total *= counts[i];
    }
    if (total > 1'000'000) fail(where, "more than 1e6 points");
    std::vector<VectorXd> pts;
    for (std::int64_t f = 0; f < total; ++f) {
        VectorXd x(n);
        std::int64_t rem = f;
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            // Integer-indexed nodes avoid accumulated drift.
            x(i) = lo(i) + static_cast<double>(rem % counts[i]) * step;
            rem /= counts[i];
        }
        pts.push_back(x);
    }
    return pts;
}

void solver_of(const json& v, SolverConfig& cfg) {
    const std::string where = "solver";
    if (!v.is_object()) fail(where, "expected an object");
    if (v.contains("method")) {
        try {
            cfg.method = parse_solver_method(v["method"].get<std::string>());
        } catch (const std::exception& e) {
            fail(where + ".method", e.what());
        }
    }
    optional_field(v, "eps_clamp", cfg.eps_clamp, where);
    optional_field(v, "initial_mesh", cfg.initial_mesh, where);
    optional_field(v, "mesh_tol", cfg.mesh_tol, where);
    optional_field(v, "max_evals", cfg.max_evals, where);
    optional_field(v, "expansion", cfg.expansion, where);
    optional_field(v, "contraction", cfg.contraction, where);
    optional_field(v, "fd_step", cfg.fd_step, where);
    optional_field(v, "grad_tol", cfg.grad_tol, where);
    optional_field(v, "heuristic_start", cfg.heuristic_start, where);
    optional_field(v, "search_points_per_shift", cfg.search_points_per_shift, where);
    optional_field(v, "seed", cfg.seed, where);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

void quad_of(const json& v, QuadConfig& cfg) {
    const std::string where = "quadrature";
    if (!v.is_object()) fail(where, "expected an object");
    optional_field(v, "eps", cfg.eps, where);
    if (v.contains("max_samples")) cfg.max_samples = static_cast<std::int64_t>(number(v["max_samples"], where + ".max_samples"));
    optional_field(v, "shifts", cfg.shifts, where);
    optional_field(v, "seed", cfg.seed, where);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

GridSpec default_grid(Eigen::Index n) {
    GridSpec g;
    g.disturbance_box = Box::cube(n, -0.5, 0.5);
    return g;
}

GridSpec dp_of(const json& v, Eigen::Index n) {
    const std::string where = "dp";
    if (!v.is_object()) fail(where, "expected an object");
    GridSpec g = default_grid(n);
    optional_field(v, "state_spacing", g.state_spacing, where);
    optional_field(v, "input_spacing", g.input_spacing, where);
    optional_field(v, "disturbance_spacing", g.disturbance_spacing, where);
    optional_field(v, "interpolate", g.interpolate, where);
    if (v.contains("disturbance_box")) g.disturbance_box = box_of(v["disturbance_box"], n, where + ".disturbance_box");
    if (!(g.state_spacing > 0.0 && g.input_spacing > 0.0 && g.disturbance_spacing > 0.0)) {
        fail(where, "spacings must be positive");
    }
    return g;
}

}  // namespace

ReachAvoidQuery Problem::query_at(const VectorXd& x0) const {
    ReachAvoidQuery q = query;
    q.x0 = x0;
    return q;
}

GridSpec Problem::dp_grid() const { return dp ? *dp : default_grid(query.system.state_dim()); }

Problem parse_problem(const nlohmann::json& doc) {
    if (!doc.is_object()) fail("problem", "top level must be an object");
    const SystemParts parts = system_of(member(doc, "system", "problem"));
    const Eigen::Index n = parts.A.rows();
    const Eigen::Index m = parts.B.cols();
    DisturbanceModel dist = disturbance_of(member(doc, "disturbance", "problem"), n);
    const Box ubox = box_of(member(doc, "input_box", "problem"), m, "input_box");
    if (ubox.empty()) fail("input_box", "must be nonempty");
    const Box safe = box_of(member(doc, "safe", "problem"), n, "safe");
    const Box target = box_of(member(doc, "target", "problem"), n, "target");
    const json& hj = member(doc, "horizon", "problem");
    if (!hj.is_number_integer() || hj.get<int>() < 1) fail("horizon", "expected a positive integer");

    std::vector<VectorXd> points;
    bool sweep = false;
    if (doc.contains("x0")) {
        points.push_back(vector_of(doc["x0"], n, 0.0, "x0"));
    } else if (doc.contains("points")) {
        const json& pj = doc["points"];
        if (!pj.is_array() || pj.empty()) fail("points", "expected a non-empty array");
        for (std::size_t i = 0; i < pj.size(); ++i) points.push_back(vector_of(pj[i], n, 0.0, "points[" + std::to_string(i) + "]"));
        sweep = true;
    } else if (doc.contains("sweep")) {
        points = sweep_points(doc["sweep"], n);
        sweep = true;
    } else {
        fail("problem", "need one of x0, points, sweep");
    }
    for (const auto& p : points) {
        if (!p.allFinite()) fail("x0", "initial states must be finite");
    }

    Problem pr{
        doc.value("name", std::string("unnamed")),
        ReachAvoidQuery{LtiSystem(parts.A, parts.B, std::move(dist), ubox), safe, target, hj.get<int>(), points.front()},
        points,
        sweep,
        {},
        {},
        std::nullopt,
        {},
        1,
    };
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        apply_master_seed(pr, doc["seed"].get<std::uint64_t>());
    }
    if (doc.contains("solver")) solver_of(doc["solver"], pr.solver);
    if (doc.contains("quadrature")) quad_of(doc["quadrature"], pr.quad);
    if (doc.contains("dp")) pr.dp = dp_of(doc["dp"], n);
    if (doc.contains("monte_carlo")) {
        const json& mc = doc["monte_carlo"];
        if (mc.contains("samples")) pr.monte_carlo.samples = static_cast<std::int64_t>(number(mc["samples"], "monte_carlo.samples"));
        optional_field(mc, "seed", pr.monte_carlo.seed, "monte_carlo");
        if (pr.monte_carlo.samples < 100) fail("monte_carlo.samples", "need at least 100 samples");
    }
    return pr;
}

Problem load_problem(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open problem file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem(doc);
}

void apply_master_seed(Problem& problem, std::uint64_t seed) {
    problem.seed = seed;
    problem.solver.seed = derive_seed(seed, 1);
    problem.quad.seed = derive_seed(seed, 2);
    problem.monte_carlo.seed = derive_seed(seed, 3);
}

nlohmann::ordered_json vector_to_json(const VectorXd& v) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isinf(v(i))) {
            out.push_back(nullptr);
        } else {
            out.push_back(v(i));
        }
    }
    return out;
}

nlohmann::ordered_json box_to_json(const Box& box) {
    return {{"lower", vector_to_json(box.lower())}, {"upper", vector_to_json(box.upper())}};
}

}  // namespace reachkit
