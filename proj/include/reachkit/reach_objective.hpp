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

#ifndef REACHKIT_REACH_OBJECTIVE_HPP
#define REACHKIT_REACH_OBJECTIVE_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "reachkit/lti_model.hpp"
#include "reachkit/mvn_quad.hpp"

namespace reachkit {

/// Input sequence violates the input bounds or has the wrong length.
class InfeasibleInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// S x ... x S x T in R^{nN}: safe set for steps 1..N-1, target at step N.
Box stacked_region(const ReachAvoidQuery& query);

struct McEstimate {
    double p_hat = 0.0;
    double half_width_95 = 0.0;
    std::int64_t n_samples = 0;
};

/**
 * Reach-avoid probability of a fixed open-loop sequence under a Gaussian
 * disturbance. Caches the stacked dynamics and the (input-independent)
 * covariance so repeated evaluations only rebuild the mean.
 */
class GaussianReachEvaluator {
public:
    explicit GaussianReachEvaluator(ReachAvoidQuery query);

    const ReachAvoidQuery& query() const { return query_; }
    const ConcatenatedDynamics& dynamics() const { return concat_; }
    const Box& region() const { return region_; }

    GaussianVector distribution(const OpenLoopPolicy& policy) const;
    QuadResult operator()(const OpenLoopPolicy& policy, const QuadConfig& cfg) const;
    /// Fixed lattice size, no adaptive refinement (see mvn_box_probability_fixed).
    QuadResult evaluate_fixed(const OpenLoopPolicy& policy, const QuadConfig& cfg,
                              std::int64_t points_per_shift) const;

private:
    ReachAvoidQuery query_;
    ConcatenatedDynamics concat_;
    Box region_;
    VectorXd offset_;  // A_bar x0 + G_bar (1 (x) mean_w)
    MatrixXd covariance_;
    bool start_safe_ = false;
};

/// P{x_k in S, k = 0..N-1, and x_N in T}. Returns 0 when x0 is outside S.
QuadResult reach_avoid_probability(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                                   const QuadConfig& cfg);

/// Monte-Carlo estimate of the same event for any disturbance with a sampler.
/// Samples are drawn in fixed-size batches with per-batch derived seeds, so the
/// estimate does not depend on `threads`.
McEstimate reach_avoid_probability_mc(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                                      std::int64_t n_samples, std::uint64_t seed, int threads = 1);

/// Characteristic function of the stacked state X at frequency beta:
/// exp(j beta^T (A_bar x0 + H_bar U)) * prod_k Psi_w((G_bar^T beta)_k).
std::complex<double> cf_X(const ConcatenatedDynamics& concat, const LtiSystem& system,
                          const VectorXd& x0, const OpenLoopPolicy& policy, const VectorXd& beta);

/// Density at x recovered from a characteristic function by trapezoidal
/// inverse Fourier transform over [-half_width, half_width]^d. Validation
/// only; d must be 1 or 2.
double density_from_cf(const std::function<std::complex<double>(const VectorXd&)>& cf,
                       const VectorXd& x, double half_width, int nodes);

}  // namespace reachkit

#endif  // REACHKIT_REACH_OBJECTIVE_HPP
