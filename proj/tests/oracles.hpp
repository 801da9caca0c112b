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

// Independent reference computations used only by tests. Nothing here calls
// into the quadrature, solver, or DP code paths it is used to check.
#ifndef REACHKIT_TESTS_ORACLES_HPP
#define REACHKIT_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double phi_cdf(double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// P(lo <= N(mean, sd^2) <= hi)
inline double normal_interval(double mean, double sd, double lo, double hi) {
    if (lo > hi) return 0.0;
    return phi_cdf((hi - mean) / sd) - phi_cdf((lo - mean) / sd);
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// Tensor-product Gauss-Legendre integration of the N(mean, cov) density
/// over [lo, hi] (d <= 3). Infinite limits are truncated at 12 marginal sd.
inline double dense_box_probability(const VectorXd& mean, const MatrixXd& cov, VectorXd lo,
                                    VectorXd hi, int nodes = 200) {
    const int d = static_cast<int>(mean.size());
    for (int i = 0; i < d; ++i) {
        const double sd = std::sqrt(cov(i, i));
        lo(i) = std::max(lo(i), mean(i) - 12.0 * sd);
        hi(i) = std::min(hi(i), mean(i) + 12.0 * sd);
        if (lo(i) >= hi(i)) return 0.0;
    }
    const MatrixXd prec = cov.inverse();
    const double norm = 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, d) * cov.determinant());
    const auto [gx, gw] = gauss_legendre(nodes);

    std::vector<std::vector<double>> pts(d), wts(d);
    for (int i = 0; i < d; ++i) {
        const double half = 0.5 * (hi(i) - lo(i));
        const double mid = 0.5 * (hi(i) + lo(i));
        for (int k = 0; k < nodes; ++k) {
            pts[i].push_back(mid + half * gx[k] - mean(i));
            wts[i].push_back(half * gw[k]);
        }
    }
    double total = 0.0;
    std::vector<int> idx(d, 0);
    VectorXd z(d);
    while (true) {
        double weight = 1.0;
        for (int i = 0; i < d; ++i) {
            z(i) = pts[i][idx[i]];
            weight *= wts[i][idx[i]];
        }
        total += weight * std::exp(-0.5 * z.dot(prec * z));
        int i = d - 1;
        while (i >= 0 && ++idx[i] == nodes) idx[i--] = 0;
        if (i < 0) break;
    }
    return norm * total;
}

/// Random symmetric positive-definite matrix with unit-ish diagonal.
inline MatrixXd random_spd(int d, std::mt19937_64& rng, double ridge = 0.2) {
    std::normal_distribution<double> nd(0.0, 1.0);
    MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = nd(rng);
    MatrixXd s = m * m.transpose() / d + ridge * MatrixXd::Identity(d, d);
    return 0.5 * (s + s.transpose());
}

/// Random correlation matrix (unit diagonal).
inline MatrixXd random_correlation(int d, std::mt19937_64& rng) {
    MatrixXd s = random_spd(d, rng);
    const VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
    return inv.asDiagonal() * s * inv.asDiagonal();
}

}  // namespace oracle

#endif  // REACHKIT_TESTS_ORACLES_HPP
