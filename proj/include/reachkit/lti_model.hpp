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

#ifndef REACHKIT_LTI_MODEL_HPP
#define REACHKIT_LTI_MODEL_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <variant>

#include "reachkit/box.hpp"

namespace reachkit {

/// w ~ N(mean, covariance), covariance symmetric positive-definite.
struct GaussianDisturbance {
    VectorXd mean;
    MatrixXd covariance;
};

/// Arbitrary i.i.d. disturbance known only through a sampler and, optionally,
/// its characteristic function.
struct SampledDisturbance {
    using Draw = std::function<VectorXd(std::mt19937_64&)>;
    using CharFn = std::function<std::complex<double>(const VectorXd&)>;

    Eigen::Index dim = 0;
    Draw draw;
    CharFn characteristic;  // may be empty
};

class DisturbanceModel {
public:
    static DisturbanceModel gaussian(VectorXd mean, MatrixXd covariance);
    static DisturbanceModel sampled(SampledDisturbance sampler);

    Eigen::Index dim() const;
    bool is_gaussian() const { return std::holds_alternative<GaussianDisturbance>(model_); }
    bool has_characteristic() const;

    /// Throws std::logic_error when the model is not Gaussian.
    const GaussianDisturbance& as_gaussian() const;

    VectorXd draw(std::mt19937_64& rng) const;
    std::complex<double> characteristic(const VectorXd& omega) const;

private:
    explicit DisturbanceModel(std::variant<GaussianDisturbance, SampledDisturbance> m);

    std::variant<GaussianDisturbance, SampledDisturbance> model_;
    MatrixXd chol_;  // lower Cholesky factor, Gaussian only
};

/// x_{k+1} = A x_k + B u_k + w_k, u_k in input_box, w_k i.i.d.
class LtiSystem {
public:
    LtiSystem(MatrixXd A, MatrixXd B, DisturbanceModel disturbance, Box input_box);

    const MatrixXd& A() const { return A_; }
    const MatrixXd& B() const { return B_; }
    const DisturbanceModel& disturbance() const { return disturbance_; }
    const Box& input_box() const { return input_box_; }

    Eigen::Index state_dim() const { return A_.rows(); }
    Eigen::Index input_dim() const { return B_.cols(); }

    VectorXd step(const VectorXd& x, const VectorXd& u, const VectorXd& w) const {
        return A_ * x + B_ * u + w;
    }

private:
    MatrixXd A_;
    MatrixXd B_;
    DisturbanceModel disturbance_;
    Box input_box_;
};

struct StateSpaceMaps {
    MatrixXd A;
    MatrixXd B;
};

/// Discrete-time chain of integrators with sampling parameter `sampling`:
/// A(i,j) = s^(j-i)/(j-i)! for j >= i, B(i) = s^(n-i)/(n-i)! (1-indexed).
StateSpaceMaps chain_of_integrators(int n, double sampling);

/**
 * Stacked N-step dynamics X = A_bar x0 + H_bar U + G_bar W.
 *
 * Row-block k (0-based) holds x_{k+1}; U and W stack u_0..u_{N-1} and
 * w_0..w_{N-1}.
 */
struct ConcatenatedDynamics {
    MatrixXd A_bar;  // nN x n
    MatrixXd H_bar;  // nN x mN
    MatrixXd G_bar;  // nN x nN
    int horizon = 0;

    Eigen::Index state_dim() const { return A_bar.cols(); }
    Eigen::Index input_dim() const { return horizon == 0 ? 0 : H_bar.cols() / horizon; }

    VectorXd stack(const VectorXd& x0, const VectorXd& U, const VectorXd& W) const {
        return A_bar * x0 + H_bar * U + G_bar * W;
    }
};

ConcatenatedDynamics build_concatenated(const MatrixXd& A, const MatrixXd& B, int horizon);
ConcatenatedDynamics build_concatenated(const LtiSystem& system, int horizon);

/// Stacked open-loop input sequence [u_0; ...; u_{N-1}].
struct OpenLoopPolicy {
    VectorXd inputs;

    VectorXd block(int k, Eigen::Index m) const { return inputs.segment(k * m, m); }
    bool feasible(const Box& input_box, int horizon) const;
};

/// Terminal-time reach-avoid question: reach `target` at step N while staying
/// in `safe` at steps 0..N-1, starting from x0.
struct ReachAvoidQuery {
    LtiSystem system;
    Box safe;
    Box target;
    int horizon = 1;
    VectorXd x0;

    /// Throws std::invalid_argument on inconsistent dimensions or horizon.
    void validate() const;
};

/// Multivariate normal N(mean, covariance).
struct GaussianVector {
    VectorXd mean;
    MatrixXd covariance;

    Eigen::Index dim() const { return mean.size(); }
};

/// Mean and covariance of the stacked state X under a Gaussian disturbance.
GaussianVector mean_covariance_of_X(const ConcatenatedDynamics& concat, const LtiSystem& system,
                                    const VectorXd& x0, const OpenLoopPolicy& policy);

/// Stepwise simulation of one trajectory; returns [x_1; ...; x_N].
VectorXd simulate_stacked(const LtiSystem& system, const VectorXd& x0, const VectorXd& U,
                          const VectorXd& W, int horizon);

}  // namespace reachkit

#endif  // REACHKIT_LTI_MODEL_HPP
