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

#ifndef REACHKIT_SOLVERS_HPP
#define REACHKIT_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reachkit/reach_objective.hpp"

namespace reachkit {

enum class SolverMethod { DirectSearch, SmoothLocal };

std::string to_string(SolverMethod method);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
    SolverMethod method = SolverMethod::DirectSearch;
    double eps_clamp = 0.01;
    /// Initial poll step. Non-positive means 0.25 * widest input range.
    double initial_mesh = 0.0;
    double mesh_tol = 1e-4;
    int max_evals = 5000;
    double expansion = 2.0;
    double contraction = 0.5;
    /// Central-difference step. Non-positive means 1e-3 * widest input range.
    double fd_step = 0.0;
    /// Projected-gradient stopping tolerance (smooth local solver).
    double grad_tol = 1e-6;
    /// Start from the least-squares heuristic instead of clipped zero.
    bool heuristic_start = false;
    /// Quadrature seed held fixed across every evaluation of one solve.
    std::uint64_t seed = 1;
    /// Lattice points per shift used for every evaluation during the search.
    /// Zero means the adaptive count needed at the start point (at least 1000).
    /// The returned p_star is always re-estimated adaptively.
    std::int64_t search_points_per_shift = 250;

    void validate() const;
};

struct TracePoint {
    int eval = 0;       ///< 1-based index of the evaluation that set the incumbent
    double best = 0.0;  ///< best-so-far value after that evaluation
};

/// Result of maximizing a generic box-constrained objective.
struct OptimizeResult {
    VectorXd x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
};

using Objective = std::function<double(const VectorXd&)>;

/**
 * Generating-set (compass) search over the box `bounds`.
 *
 * Polls +e_1, -e_1, +e_2, ... scaled by the mesh size, with every poll point
 * clipped into the box. The first strictly improving poll is accepted and the
 * mesh expands; a failed poll contracts it. Stops when the mesh drops below
 * cfg.mesh_tol, evals reach cfg.max_evals, or the value reaches
 * `upper_bound`.
 */
OptimizeResult direct_search(const Objective& f, const Box& bounds, VectorXd start,
                             const SolverConfig& cfg, std::optional<double> upper_bound = {});

/// Projected-gradient ascent with central differences and Armijo
/// backtracking, projecting onto `bounds` after every step.
OptimizeResult smooth_local(const Objective& f, const Box& bounds, VectorXd start,
                            const SolverConfig& cfg, std::optional<double> upper_bound = {});

struct SolveResult {
    OpenLoopPolicy U_star;
    QuadResult p_star;
    int evals = 0;
    double wall_time = 0.0;  ///< seconds
    bool converged = false;
    /// (evaluation index, best-so-far probability)
    std::vector<TracePoint> trace;
};

/// log(max(p, eps_clamp))
double clamped_log(double p, double eps_clamp);

double clamped_log_objective(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                             double eps_clamp, const QuadConfig& quad_cfg);

/// Unclipped minimizer of |A_bar x0 + H_bar U + G_bar (1 (x) mean_w) - (1 (x) target centre)|.
VectorXd least_squares_inputs(const ReachAvoidQuery& query);

/// Zero sequence clipped to the input box, or the clipped least-squares
/// heuristic.
OpenLoopPolicy initial_guess(const ReachAvoidQuery& query, bool heuristic = false);

SolveResult maximize_direct_search(const ReachAvoidQuery& query, const SolverConfig& cfg,
                                   const QuadConfig& quad_cfg);
SolveResult maximize_smooth_local(const ReachAvoidQuery& query, const SolverConfig& cfg,
                                  const QuadConfig& quad_cfg);
/// Dispatches on cfg.method.
SolveResult solve(const ReachAvoidQuery& query, const SolverConfig& cfg, const QuadConfig& quad_cfg);

}  // namespace reachkit

#endif  // REACHKIT_SOLVERS_HPP
