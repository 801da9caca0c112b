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

// Random reach-avoid queries shared by the unit and acceptance tests.
#ifndef REACHKIT_TEST_FIXTURES_HPP
#define REACHKIT_TEST_FIXTURES_HPP

#include <random>
#include <utility>

#include "oracles.hpp"
#include "reachkit/reach_objective.hpp"

namespace reachkit::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Mildly stable random system with a box-bounded scalar input, a safe box
/// of half-width 3 and a target inside it. Probabilities land mostly in the
/// interior of (0, 1).
inline ReachAvoidQuery random_query(std::mt19937_64& rng, int n, int N) {
    std::normal_distribution<double> nd(0.0, 1.0);
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
    const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
    A *= uniform(rng, 0.5, 1.0) / rho;
    MatrixXd B(n, 1);
    for (int i = 0; i < n; ++i) B(i, 0) = nd(rng);
    const MatrixXd cov = uniform(rng, 0.05, 0.3) * oracle::random_correlation(n, rng);
    LtiSystem sys(A, B, DisturbanceModel::gaussian(VectorXd::Zero(n), cov), Box::cube(1, -1.0, 1.0));
    const Box safe = Box::cube(n, -3.0, 3.0);
    VectorXd tl(n), tu(n), x0(n);
    for (int i = 0; i < n; ++i) {
        const double c = uniform(rng, -1.0, 1.0);
        const double h = uniform(rng, 0.4, 1.5);
        tl(i) = c - h;
        tu(i) = c + h;
        x0(i) = uniform(rng, -2.0, 2.0);
    }
    return ReachAvoidQuery{sys, safe, Box(tl, tu), N, x0};
}

inline OpenLoopPolicy random_policy(std::mt19937_64& rng, const ReachAvoidQuery& q) {
    const Eigen::Index len = q.system.input_dim() * q.horizon;
    VectorXd u(len);
    for (Eigen::Index i = 0; i < len; ++i) u(i) = uniform(rng, -1.0, 1.0);
    return OpenLoopPolicy{u};
}

/// Query and inputs whose reach-avoid probability lies in [lo, 1 - lo], so
/// the Wald interval of an MC estimate does not collapse to zero width.
inline std::pair<ReachAvoidQuery, OpenLoopPolicy> nondegenerate_case(std::mt19937_64& rng, int n, int N,
                                                                      double lo = 0.01) {
    for (;;) {
        auto q = random_query(rng, n, N);
        const auto u = random_policy(rng, q);
        const double p = reach_avoid_probability(q, u, QuadConfig{}).p;
        if (p >= lo && p <= 1.0 - lo) return {q, u};
    }
}

}  // namespace reachkit::testing

#endif  // REACHKIT_TEST_FIXTURES_HPP
