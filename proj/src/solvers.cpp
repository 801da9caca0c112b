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

#include "reachkit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace reachkit {

namespace {

double widest_range(const Box& bounds) { return bounds.width().maxCoeff(); }

double resolved_mesh(const SolverConfig& cfg, const Box& bounds) {
    return cfg.initial_mesh > 0.0 ? cfg.initial_mesh : 0.25 * widest_range(bounds);
}

double resolved_fd_step(const SolverConfig& cfg, const Box& bounds) {
    return cfg.fd_step > 0.0 ? cfg.fd_step : 1e-3 * widest_range(bounds);
}

/// Counts evaluations and records incumbent improvements.
class Tracker {
public:
    Tracker(const Objective& f, int max_evals) : f_(f), max_evals_(max_evals) {}

    double eval(const VectorXd& x) {
        ++evals_;
        return f_(x);
    }
    void improved(double value) { trace_.push_back({evals_, value}); }
    bool exhausted() const { return evals_ >= max_evals_; }
    int evals() const { return evals_; }
    std::vector<TracePoint> take_trace() { return std::move(trace_); }

private:
    const Objective& f_;
    int max_evals_;
    int evals_ = 0;
    std::vector<TracePoint> trace_;
};

void check_start(const Box& bounds, const VectorXd& start) {
    if (!bounds.bounded()) throw std::invalid_argument("solver: bounds must be finite");
    if (bounds.empty()) throw std::invalid_argument("solver: bounds are empty");
    if (start.size() != bounds.dim()) throw std::invalid_argument("solver: start has wrong dimension");
}

}  // namespace

std::string to_string(SolverMethod method) {
    return method == SolverMethod::DirectSearch ? "ds" : "sl";
}

SolverMethod parse_solver_method(const std::string& name) {
    if (name == "ds" || name == "direct_search") return SolverMethod::DirectSearch;
    if (name == "sl" || name == "smooth_local") return SolverMethod::SmoothLocal;
    throw std::invalid_argument("unknown solver method '" + name + "'");
}

void SolverConfig::validate() const {
    if (!(eps_clamp > 0.0 && eps_clamp < 1.0)) throw std::invalid_argument("SolverConfig: eps_clamp must lie in (0, 1)");
    if (!(mesh_tol > 0.0)) throw std::invalid_argument("SolverConfig: mesh_tol must be positive");
    if (initial_mesh > 0.0 && !(mesh_tol < initial_mesh)) {
        throw std::invalid_argument("SolverConfig: mesh_tol must be below initial_mesh");
    }
    if (max_evals < 1) throw std::invalid_argument("SolverConfig: max_evals must be positive");
    if (!(expansion > 1.0)) throw std::invalid_argument("SolverConfig: expansion must exceed 1");
    if (!(contraction > 0.0 && contraction < 1.0)) throw std::invalid_argument("SolverConfig: contraction must lie in (0, 1)");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("SolverConfig: grad_tol must be positive");
}

OptimizeResult direct_search(const Objective& f, const Box& bounds, VectorXd start,
                             const SolverConfig& cfg, std::optional<double> upper_bound) {
    cfg.validate();
    check_start(bounds, start);
    const Eigen::Index dim = bounds.dim();
    const double max_mesh = widest_range(bounds);
    double mesh = std::min(resolved_mesh(cfg, bounds), max_mesh);

    Tracker tracker(f, cfg.max_evals);
    OptimizeResult res;
    res.x = bounds.clip(start);
    res.value = tracker.eval(res.x);
    tracker.improved(res.value);
    auto at_bound = [&] { return upper_bound && res.value >= *upper_bound; };

    VectorXd poll(dim);
    while (!at_bound() && mesh >= cfg.mesh_tol && !tracker.exhausted()) {
        bool improved = false;
        for (Eigen::Index i = 0; i < dim && !improved && !tracker.exhausted(); ++i) {
            for (double sign : {1.0, -1.0}) {
                const double moved = std::clamp(res.x(i) + sign * mesh, bounds.lower()(i), bounds.upper()(i));
                if (moved == res.x(i)) continue;
                poll = res.x;
                poll(i) = moved;
                const double value = tracker.eval(poll);
                if (value > res.value) {
                    res.x = poll;
                    res.value = value;
                    tracker.improved(value);
                    improved = true;
                    break;
                }
                if (tracker.exhausted()) break;
            }
        }
        mesh = improved ? std::min(mesh * cfg.expansion, max_mesh) : mesh * cfg.contraction;
    }
    res.converged = at_bound() || mesh < cfg.mesh_tol;
    res.evals = tracker.evals();
    res.trace = tracker.take_trace();
    return res;
}

OptimizeResult smooth_local(const Objective& f, const Box& bounds, VectorXd start,
                            const SolverConfig& cfg, std::optional<double> upper_bound) {
    cfg.validate();
    check_start(bounds, start);
    const Eigen::Index dim = bounds.dim();
    const double h = resolved_fd_step(cfg, bounds);
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 40;

    Tracker tracker(f, cfg.max_evals);
    OptimizeResult res;
    res.x = bounds.clip(start);
    res.value = tracker.eval(res.x);
    tracker.improved(res.value);

    double step = 1.0;
    VectorXd grad(dim), probe(dim);
    while (!tracker.exhausted()) {
        if (upper_bound && res.value >= *upper_bound) {
            res.converged = true;
            break;
        }
        if (tracker.evals() + 2 * dim > cfg.max_evals) break;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double hi = std::min(res.x(i) + h, bounds.upper()(i));
            const double lo = std::max(res.x(i) - h, bounds.lower()(i));
            probe = res.x;
            probe(i) = hi;
            const double f_hi = tracker.eval(probe);
            probe(i) = lo;
            const double f_lo = tracker.eval(probe);
            grad(i) = hi > lo ? (f_hi - f_lo) / (hi - lo) : 0.0;
        }
        const VectorXd projected = bounds.clip(res.x + grad) - res.x;
        if (projected.lpNorm<Eigen::Infinity>() < cfg.grad_tol) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        double t = step;
        for (int bt = 0; bt < kMaxBacktracks && !tracker.exhausted(); ++bt, t *= 0.5) {
            const VectorXd candidate = bounds.clip(res.x + t * grad);
            const VectorXd move = candidate - res.x;
            if (move.lpNorm<Eigen::Infinity>() == 0.0) break;
            const double value = tracker.eval(candidate);
            if (value >= res.value + kArmijo * grad.dot(move) && value > res.value) {
                res.x = candidate;
                res.value = value;
                tracker.improved(value);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        step = std::min(2.0 * t, 1e6);
    }
    res.evals = tracker.evals();
    res.trace = tracker.take_trace();
    return res;
}

double clamped_log(double p, double eps_clamp) { return std::log(std::max(p, eps_clamp)); }

double clamped_log_objective(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                             double eps_clamp, const QuadConfig& quad_cfg) {
    return clamped_log(reach_avoid_probability(query, policy, quad_cfg).p, eps_clamp);
}

VectorXd least_squares_inputs(const ReachAvoidQuery& query) {
    query.validate();
    const auto concat = build_concatenated(query.system, query.horizon);
    const Eigen::Index n = query.system.state_dim();
    const int N = query.horizon;
    VectorXd mean_w = VectorXd::Zero(n);
    if (query.system.disturbance().is_gaussian()) mean_w = query.system.disturbance().as_gaussian().mean;
    const VectorXd goal = query.target.center().replicate(N, 1);
    const VectorXd rhs = goal - concat.A_bar * query.x0 - concat.G_bar * mean_w.replicate(N, 1);
    return concat.H_bar.completeOrthogonalDecomposition().solve(rhs);
}

OpenLoopPolicy initial_guess(const ReachAvoidQuery& query, bool heuristic) {
    const Box& ubox = query.system.input_box();
    const Eigen::Index m = ubox.dim();
    const int N = query.horizon;
    VectorXd U = heuristic ? least_squares_inputs(query) : VectorXd::Zero(m * N);
    for (int k = 0; k < N; ++k) U.segment(k * m, m) = ubox.clip(U.segment(k * m, m));
    return {U};
}

namespace {

SolveResult run_reach_solver(const ReachAvoidQuery& query, const SolverConfig& cfg,
                             const QuadConfig& quad_cfg, SolverMethod method) {
    const auto started = std::chrono::steady_clock::now();
    cfg.validate();
    quad_cfg.validate();
    if (!query.system.input_box().bounded()) {
        throw std::invalid_argument("solver: input bounds must be finite");
    }
    const GaussianReachEvaluator evaluator(query);
    const Box bounds = repeat(query.system.input_box(), query.horizon);

    QuadConfig crn = quad_cfg;
    crn.seed = cfg.seed;
    const VectorXd start = initial_guess(query, cfg.heuristic_start).inputs;

    std::int64_t points = cfg.search_points_per_shift;
    if (points <= 0 && query.safe.contains(query.x0)) {
        const QuadResult at_start = evaluator(OpenLoopPolicy{start}, crn);
        points = std::max<std::int64_t>(1000, at_start.samples_used / crn.shifts);
    }
    std::vector<double> probabilities;
    const Objective objective = [&](const VectorXd& U) {
        const double p = evaluator.evaluate_fixed(OpenLoopPolicy{U}, crn, points).p;
        probabilities.push_back(p);
        return clamped_log(p, cfg.eps_clamp);
    };

    SolveResult out;
    if (!query.safe.contains(query.x0)) {
        // The event fails at k = 0 whatever the inputs.
        out.U_star = {start};
        out.converged = true;
        out.trace.push_back({0, 0.0});
    } else {
        const OptimizeResult opt = method == SolverMethod::DirectSearch
                                       ? direct_search(objective, bounds, start, cfg, 0.0)
                                       : smooth_local(objective, bounds, start, cfg, 0.0);
        out.U_star = {opt.x};
        out.evals = opt.evals;
        out.converged = opt.converged;
        for (const auto& tp : opt.trace) {
            out.trace.push_back({tp.eval, probabilities[static_cast<std::size_t>(tp.eval - 1)]});
        }
        out.p_star = evaluator(out.U_star, crn);
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace

SolveResult maximize_direct_search(const ReachAvoidQuery& query, const SolverConfig& cfg,
                                   const QuadConfig& quad_cfg) {
    return run_reach_solver(query, cfg, quad_cfg, SolverMethod::DirectSearch);
}

SolveResult maximize_smooth_local(const ReachAvoidQuery& query, const SolverConfig& cfg,
                                  const QuadConfig& quad_cfg) {
    return run_reach_solver(query, cfg, quad_cfg, SolverMethod::SmoothLocal);
}

SolveResult solve(const ReachAvoidQuery& query, const SolverConfig& cfg, const QuadConfig& quad_cfg) {
    return run_reach_solver(query, cfg, quad_cfg, cfg.method);
}

}  // namespace reachkit
