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

#include "reachkit/reach_objective.hpp"

#include <cmath>
#include <numbers>

#include "reachkit/parallel.hpp"
#include "reachkit/random.hpp"

namespace reachkit {

namespace {

constexpr std::int64_t kMcBatch = 8192;

void require_feasible(const ReachAvoidQuery& query, const OpenLoopPolicy& policy) {
    if (!policy.feasible(query.system.input_box(), query.horizon)) {
        throw InfeasibleInput("open-loop input sequence is outside the input bounds or has the wrong length");
    }
}

ReachAvoidQuery validated(ReachAvoidQuery query) {
    query.validate();
    return query;
}

}  // namespace

Box stacked_region(const ReachAvoidQuery& query) {
    const Eigen::Index n = query.system.state_dim();
    const int N = query.horizon;
    VectorXd lo(n * N), hi(n * N);
    for (int k = 0; k + 1 < N; ++k) {
        lo.segment(k * n, n) = query.safe.lower();
        hi.segment(k * n, n) = query.safe.upper();
    }
    lo.segment((N - 1) * n, n) = query.target.lower();
    hi.segment((N - 1) * n, n) = query.target.upper();
    return Box(std::move(lo), std::move(hi));
}

GaussianReachEvaluator::GaussianReachEvaluator(ReachAvoidQuery query)
    : query_(validated(std::move(query))),
      concat_(build_concatenated(query_.system, query_.horizon)),
      region_(stacked_region(query_)) {
    const auto& g = query_.system.disturbance().as_gaussian();
    const Eigen::Index n = query_.system.state_dim();
    const int N = query_.horizon;
    offset_ = concat_.A_bar * query_.x0 + concat_.G_bar * g.mean.replicate(N, 1);
    MatrixXd block_cov = MatrixXd::Zero(n * N, n * N);
    for (int k = 0; k < N; ++k) block_cov.block(k * n, k * n, n, n) = g.covariance;
    covariance_ = concat_.G_bar * block_cov * concat_.G_bar.transpose();
    covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
    start_safe_ = query_.safe.contains(query_.x0);
}

GaussianVector GaussianReachEvaluator::distribution(const OpenLoopPolicy& policy) const {
    return {offset_ + concat_.H_bar * policy.inputs, covariance_};
}

QuadResult GaussianReachEvaluator::operator()(const OpenLoopPolicy& policy, const QuadConfig& cfg) const {
    require_feasible(query_, policy);
    if (!start_safe_) return {};
    return mvn_box_probability(distribution(policy), region_, cfg);
}

QuadResult GaussianReachEvaluator::evaluate_fixed(const OpenLoopPolicy& policy, const QuadConfig& cfg,
                                                  std::int64_t points_per_shift) const {
    require_feasible(query_, policy);
    if (!start_safe_) return {};
    return mvn_box_probability_fixed(distribution(policy), region_, cfg, points_per_shift);
}

QuadResult reach_avoid_probability(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                                   const QuadConfig& cfg) {
    return GaussianReachEvaluator(query)(policy, cfg);
}

McEstimate reach_avoid_probability_mc(const ReachAvoidQuery& query, const OpenLoopPolicy& policy,
                                      std::int64_t n_samples, std::uint64_t seed, int threads) {
    query.validate();
    require_feasible(query, policy);
    if (n_samples < 100) throw std::invalid_argument("reach_avoid_probability_mc: need at least 100 samples");

    McEstimate est;
    est.n_samples = n_samples;
    if (!query.safe.contains(query.x0)) return est;

    const LtiSystem& sys = query.system;
    const Eigen::Index m = sys.input_dim();
    const int N = query.horizon;
    std::vector<VectorXd> inputs;
    for (int k = 0; k < N; ++k) inputs.push_back(policy.block(k, m));

    const std::size_t batches = static_cast<std::size_t>((n_samples + kMcBatch - 1) / kMcBatch);
    std::vector<std::int64_t> hits(batches, 0);
    parallel_for(batches, threads, [&](std::size_t b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        const std::int64_t begin = static_cast<std::int64_t>(b) * kMcBatch;
        const std::int64_t end = std::min(n_samples, begin + kMcBatch);
        std::int64_t count = 0;
        VectorXd x(sys.state_dim());
        for (std::int64_t s = begin; s < end; ++s) {
            x = query.x0;
            bool ok = true;
            for (int k = 0; k < N; ++k) {
                // Draw every step so the random stream is path-independent.
                const VectorXd w = sys.disturbance().draw(rng);
                if (!ok) continue;
                x = sys.A() * x + sys.B() * inputs[static_cast<std::size_t>(k)] + w;
                const Box& set = (k + 1 == N) ? query.target : query.safe;
                ok = set.contains(x);
            }
            count += ok ? 1 : 0;
        }
        hits[b] = count;
    });

    std::int64_t total = 0;
    for (auto h : hits) total += h;
    est.p_hat = static_cast<double>(total) / static_cast<double>(n_samples);
    est.half_width_95 = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_samples));
    return est;
}

std::complex<double> cf_X(const ConcatenatedDynamics& concat, const LtiSystem& system,
                          const VectorXd& x0, const OpenLoopPolicy& policy, const VectorXd& beta) {
    const auto& dist = system.disturbance();
    if (!dist.has_characteristic()) throw std::logic_error("cf_X: disturbance has no characteristic function");
    const Eigen::Index n = system.state_dim();
    const int N = concat.horizon;
    if (beta.size() != n * N) throw std::invalid_argument("cf_X: frequency dimension mismatch");
    if (policy.inputs.size() != concat.H_bar.cols()) throw std::invalid_argument("cf_X: policy length mismatch");

    const double phase = beta.dot(concat.A_bar * x0 + concat.H_bar * policy.inputs);
    std::complex<double> value = std::polar(1.0, phase);
    const VectorXd omega = concat.G_bar.transpose() * beta;
    for (int k = 0; k < N; ++k) value *= dist.characteristic(omega.segment(k * n, n));
    return value;
}

double density_from_cf(const std::function<std::complex<double>(const VectorXd&)>& cf,
                       const VectorXd& x, double half_width, int nodes) {
    const Eigen::Index d = x.size();
    if (d < 1 || d > 2) throw std::invalid_argument("density_from_cf: only d = 1 or 2 is supported");
    if (nodes < 3 || half_width <= 0.0) throw std::invalid_argument("density_from_cf: bad grid");

    const double h = 2.0 * half_width / (nodes - 1);
    auto weight = [&](int i) { return (i == 0 || i == nodes - 1) ? 0.5 : 1.0; };
    double acc = 0.0;
    VectorXd beta(d);
    if (d == 1) {
        for (int i = 0; i < nodes; ++i) {
            beta(0) = -half_width + i * h;
            acc += weight(i) * (std::polar(1.0, -beta.dot(x)) * cf(beta)).real();
        }
        return acc * h / (2.0 * std::numbers::pi);
    }
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            beta << -half_width + i * h, -half_width + j * h;
            acc += weight(i) * weight(j) * (std::polar(1.0, -beta.dot(x)) * cf(beta)).real();
        }
    }
    return acc * h * h / (4.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace reachkit
