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

#ifndef REACHKIT_MVN_QUAD_HPP
#define REACHKIT_MVN_QUAD_HPP

#include <cstdint>
#include <vector>

#include "reachkit/box.hpp"
#include "reachkit/lti_model.hpp"

namespace reachkit {

struct QuadConfig {
    double eps = 1e-3;                 ///< target absolute error
    std::int64_t max_samples = 10'000'000;  ///< cap on integrand evaluations, all shifts
    int shifts = 12;                   ///< independent random shifts
    std::uint64_t seed = 20170301;

    void validate() const;
};

struct QuadResult {
    double p = 0.0;
    double err_est = 0.0;
    std::int64_t samples_used = 0;
};

/// Permuted Cholesky factor: L L^T = P Sigma P^T where row i of P picks
/// variable perm[i].
struct ReorderedCholesky {
    MatrixXd L;
    std::vector<Eigen::Index> perm;
};

/// Thrown when the covariance cannot be factored even after one jitter step.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Cholesky factorization with greedy variable reordering.
 *
 * At each step the remaining variable with the smallest conditional interval
 * probability (given the truncated-normal means of the variables already
 * placed) is moved forward. Ties keep the original order. If a pivot is not
 * positive, the diagonal is jittered once by 1e-12 trace/d and the
 * factorization restarted.
 */
ReorderedCholesky cholesky_with_reorder(const GaussianVector& g, const Box& box);

/**
 * P(lower <= Y <= upper) for Y ~ g.
 *
 * Genz's separation-of-variables transform integrated by a randomized
 * Richtmyer lattice (generating vector sqrt(prime_j)) with a baker's
 * periodization and antithetic pairs. The number of points per shift starts
 * at 1000 and doubles until err_est <= eps or the sample cap is reached.
 * err_est is three standard errors across shifts.
 */
QuadResult mvn_box_probability(const GaussianVector& g, const Box& box, const QuadConfig& cfg);

/// Same estimator with a fixed number of lattice points per shift and no
/// adaptive refinement. For a fixed seed the result is a continuous function
/// of the mean and box, which is what a direct-search solver needs.
QuadResult mvn_box_probability_fixed(const GaussianVector& g, const Box& box, const QuadConfig& cfg,
                                     std::int64_t points_per_shift);

}  // namespace reachkit

#endif  // REACHKIT_MVN_QUAD_HPP
