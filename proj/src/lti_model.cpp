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

#include "reachkit/lti_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "reachkit/normal.hpp"
#include "reachkit/random.hpp"

namespace reachkit {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

DisturbanceModel::DisturbanceModel(std::variant<GaussianDisturbance, SampledDisturbance> m)
    : model_(std::move(m)) {}

DisturbanceModel DisturbanceModel::gaussian(VectorXd mean, MatrixXd covariance) {
    const Eigen::Index n = mean.size();
    require(n > 0, "gaussian disturbance: empty mean");
    require(covariance.rows() == n && covariance.cols() == n,
            "gaussian disturbance: covariance shape does not match mean");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    require((covariance - covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "gaussian disturbance: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() > 0.0,
            "gaussian disturbance: covariance is not positive definite");

    DisturbanceModel model(GaussianDisturbance{std::move(mean), covariance});
    model.chol_ = Eigen::LLT<MatrixXd>(covariance).matrixL();
    return model;
}

DisturbanceModel DisturbanceModel::sampled(SampledDisturbance sampler) {
    require(sampler.dim > 0, "sampled disturbance: dimension must be positive");
    require(static_cast<bool>(sampler.draw), "sampled disturbance: missing draw procedure");
    return DisturbanceModel(std::move(sampler));
}

Eigen::Index DisturbanceModel::dim() const {
    if (is_gaussian()) return std::get<GaussianDisturbance>(model_).mean.size();
    return std::get<SampledDisturbance>(model_).dim;
}

bool DisturbanceModel::has_characteristic() const {
    if (is_gaussian()) return true;
    return static_cast<bool>(std::get<SampledDisturbance>(model_).characteristic);
}

const GaussianDisturbance& DisturbanceModel::as_gaussian() const {
    if (!is_gaussian()) throw std::logic_error("disturbance model is not Gaussian");
    return std::get<GaussianDisturbance>(model_);
}

VectorXd DisturbanceModel::draw(std::mt19937_64& rng) const {
    if (is_gaussian()) {
        const auto& g = std::get<GaussianDisturbance>(model_);
        VectorXd z(g.mean.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal::quantile(uniform_open01(rng));
        return g.mean + chol_.triangularView<Eigen::Lower>() * z;
    }
    const auto& s = std::get<SampledDisturbance>(model_);
    VectorXd w = s.draw(rng);
    if (w.size() != s.dim) throw std::runtime_error("sampled disturbance: draw has wrong dimension");
    return w;
}

std::complex<double> DisturbanceModel::characteristic(const VectorXd& omega) const {
    if (is_gaussian()) {
        const auto& g = std::get<GaussianDisturbance>(model_);
        const double phase = omega.dot(g.mean);
        const double quad = omega.dot(g.covariance * omega);
        return std::exp(std::complex<double>(-0.5 * quad, phase));
    }
    const auto& s = std::get<SampledDisturbance>(model_);
    if (!s.characteristic) throw std::logic_error("disturbance has no characteristic function");
    return s.characteristic(omega);
}

LtiSystem::LtiSystem(MatrixXd A, MatrixXd B, DisturbanceModel disturbance, Box input_box)
    : A_(std::move(A)), B_(std::move(B)), disturbance_(std::move(disturbance)),
      input_box_(std::move(input_box)) {
    require(A_.rows() > 0 && A_.rows() == A_.cols(), "LtiSystem: A must be square");
    require(B_.rows() == A_.rows(), "LtiSystem: B row count must equal state dimension");
    require(B_.cols() > 0, "LtiSystem: B must have at least one column");
    require(disturbance_.dim() == A_.rows(),
            "LtiSystem: disturbance dimension must equal state dimension");
    require(input_box_.dim() == B_.cols(), "LtiSystem: input box dimension must equal input dimension");
    require(!input_box_.empty(), "LtiSystem: input box is empty");
}

StateSpaceMaps chain_of_integrators(int n, double sampling) {
    require(n >= 1, "chain_of_integrators: n must be positive");
    require(sampling > 0.0, "chain_of_integrators: sampling parameter must be positive");
    // coeff[p] = s^p / p!
    std::vector<double> coeff(static_cast<std::size_t>(n) + 1);
    coeff[0] = 1.0;
    for (int p = 1; p <= n; ++p) coeff[p] = coeff[p - 1] * sampling / p;

    StateSpaceMaps maps{MatrixXd::Zero(n, n), MatrixXd::Zero(n, 1)};
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) maps.A(i, j) = coeff[j - i];
        maps.B(i, 0) = coeff[n - i];
    }
    return maps;
}

ConcatenatedDynamics build_concatenated(const MatrixXd& A, const MatrixXd& B, int horizon) {
    require(horizon >= 1, "build_concatenated: horizon must be positive");
    require(A.rows() > 0 && A.rows() == A.cols(), "build_concatenated: A must be square");
    require(B.rows() == A.rows(), "build_concatenated: B row count must equal state dimension");
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();

    // powers[k] = A^k, k = 0..N
    std::vector<MatrixXd> powers;
    powers.reserve(static_cast<std::size_t>(horizon) + 1);
    powers.push_back(MatrixXd::Identity(n, n));
    for (int k = 1; k <= horizon; ++k) powers.push_back(A * powers.back());

    std::vector<MatrixXd> powers_B;
    powers_B.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) powers_B.push_back(powers[k] * B);

    ConcatenatedDynamics c;
    c.horizon = horizon;
    c.A_bar = MatrixXd::Zero(n * horizon, n);
    c.H_bar = MatrixXd::Zero(n * horizon, m * horizon);
    c.G_bar = MatrixXd::Zero(n * horizon, n * horizon);
    for (int k = 0; k < horizon; ++k) {
        c.A_bar.block(k * n, 0, n, n) = powers[k + 1];
        for (int j = 0; j <= k; ++j) {
            c.H_bar.block(k * n, j * m, n, m) = powers_B[k - j];
            c.G_bar.block(k * n, j * n, n, n) = powers[k - j];
        }
    }
    return c;
}

ConcatenatedDynamics build_concatenated(const LtiSystem& system, int horizon) {
    return build_concatenated(system.A(), system.B(), horizon);
}

bool OpenLoopPolicy::feasible(const Box& input_box, int horizon) const {
    const Eigen::Index m = input_box.dim();
    if (inputs.size() != m * horizon) return false;
    for (int k = 0; k < horizon; ++k) {
        if (!input_box.contains(inputs.segment(k * m, m))) return false;
    }
    return true;
}

void ReachAvoidQuery::validate() const {
    const Eigen::Index n = system.state_dim();
    require(horizon >= 1, "query: horizon must be at least 1");
    require(safe.dim() == n, "query: safe set dimension must equal state dimension");
    require(target.dim() == n, "query: target set dimension must equal state dimension");
    require(x0.size() == n, "query: x0 dimension must equal state dimension");
    require(x0.allFinite(), "query: x0 must be finite");
}

GaussianVector mean_covariance_of_X(const ConcatenatedDynamics& concat, const LtiSystem& system,
                                    const VectorXd& x0, const OpenLoopPolicy& policy) {
    const auto& g = system.disturbance().as_gaussian();
    const Eigen::Index n = system.state_dim();
    const int N = concat.horizon;
    require(concat.state_dim() == n, "mean_covariance_of_X: dynamics/system dimension mismatch");
    require(x0.size() == n, "mean_covariance_of_X: x0 dimension mismatch");
    require(policy.inputs.size() == concat.H_bar.cols(), "mean_covariance_of_X: policy length mismatch");

    const VectorXd mean_w = g.mean.replicate(N, 1);
    MatrixXd block_cov = MatrixXd::Zero(n * N, n * N);
    for (int k = 0; k < N; ++k) block_cov.block(k * n, k * n, n, n) = g.covariance;

    GaussianVector out;
    out.mean = concat.G_bar * mean_w + concat.A_bar * x0 + concat.H_bar * policy.inputs;
    out.covariance = concat.G_bar * block_cov * concat.G_bar.transpose();
    // Symmetrize away round-off.
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

VectorXd simulate_stacked(const LtiSystem& system, const VectorXd& x0, const VectorXd& U,
                          const VectorXd& W, int horizon) {
    const Eigen::Index n = system.state_dim();
    const Eigen::Index m = system.input_dim();
    require(U.size() == m * horizon && W.size() == n * horizon, "simulate_stacked: length mismatch");
    VectorXd X(n * horizon);
    VectorXd x = x0;
    for (int k = 0; k < horizon; ++k) {
        x = system.step(x, U.segment(k * m, m), W.segment(k * n, n));
        X.segment(k * n, n) = x;
    }
    return X;
}

}  // namespace reachkit
