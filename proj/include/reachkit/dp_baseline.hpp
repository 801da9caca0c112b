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

#ifndef REACHKIT_DP_BASELINE_HPP
#define REACHKIT_DP_BASELINE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachkit/lti_model.hpp"

namespace reachkit {

/// Discretization for the gridded backward recursion.
struct GridSpec {
    double state_spacing = 0.05;
    double input_spacing = 0.1;
    Box disturbance_box = Box::cube(1, -0.5, 0.5);
    double disturbance_spacing = 0.05;
    /// Multilinear interpolation of successors instead of nearest-node snapping.
    bool interpolate = false;
};

/// Largest grid dp_solve will allocate, in stored node values.
inline constexpr double kDpMaxNodeValues = 2e8;

class DpGridTooLarge : public std::runtime_error {
public:
    DpGridTooLarge(const std::string& what, double node_values)
        : std::runtime_error(what), node_values_(node_values) {}
    double node_values() const { return node_values_; }

private:
    double node_values_;
};

/**
 * Value functions V_0..V_N on a regular state grid covering the safe set.
 * Node j of dimension i sits at lower(i) + j * spacing. values[k] is stored
 * row-major with the last state coordinate varying fastest.
 */
struct ValueGrid {
    int horizon = 0;
    double spacing = 0.0;
    std::vector<std::int64_t> counts;
    VectorXd lower;
    VectorXd upper;  ///< last node per dimension
    std::vector<std::vector<double>> values;

    Eigen::Index state_dim() const { return lower.size(); }
    std::int64_t node_count() const;
    VectorXd node(std::int64_t flat) const;
    std::int64_t flat_index(const std::vector<std::int64_t>& multi) const;
};

/// Node values (nodes x (N+1)) a dp_solve call would store.
double dp_node_values(const ReachAvoidQuery& query, const GridSpec& grid);

/**
 * Backward recursion
 *   V_N(x) = 1_T(x),
 *   V_k(x) = 1_S(x) max_u sum_w V_{k+1}(succ(A x + B u + w)) q(w)
 * over the input grid, with q the disturbance density at cell midpoints of
 * the truncated disturbance box, renormalized to sum to one. Successors
 * outside S contribute zero. The lowest-index input wins ties.
 *
 * Throws DpGridTooLarge above kDpMaxNodeValues, std::invalid_argument for
 * n > 3, unbounded S or U, or a non-Gaussian disturbance.
 */
ValueGrid dp_solve(const ReachAvoidQuery& query, const GridSpec& grid, int threads = 1);

/// Multilinear interpolation of V_0 at x0. Throws std::out_of_range outside
/// the grid's bounding box.
double dp_value_at(const ValueGrid& grid, const VectorXd& x0);

/// Discretized one-step disturbance: midpoints and renormalized weights.
struct DisturbanceGrid {
    std::vector<VectorXd> points;
    std::vector<double> weights;
};
DisturbanceGrid discretize_disturbance(const GaussianDisturbance& w, const GridSpec& grid);

/**
 * Binary layout, all little-endian:
 *   8 bytes  magic "RKVGRID1"
 *   int64    n, horizon, counts[n]
 *   float64  spacing, lower[n], upper[n]
 *   float64  payload[(horizon + 1) * prod(counts)], step-major, row-major per step
 * A JSON sidecar `<path>.json` repeats the geometry plus `metadata`.
 */
void write_value_grid(const ValueGrid& grid, const std::string& path,
                      const std::string& metadata_json = "{}");
ValueGrid read_value_grid(const std::string& path);

}  // namespace reachkit

#endif  // REACHKIT_DP_BASELINE_HPP
