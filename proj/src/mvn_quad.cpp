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

#include "reachkit/mvn_quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "reachkit/normal.hpp"
#include "reachkit/random.hpp"

namespace reachkit {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Mean of a standard normal truncated to [a, b].
double truncated_mean(double a, double b, double prob) {
    if (prob > 1e-300) {
        const double pa = std::isinf(a) ? 0.0 : normal::pdf(a);
        const double pb = std::isinf(b) ? 0.0 : normal::pdf(b);
        return (pa - pb) / prob;
    }
    // Interval lies far in a tail; its mass concentrates at the nearer end.
    if (std::isinf(a)) return b;
    if (std::isinf(b)) return a;
    return 0.5 * (a + b);
}

std::vector<double> first_primes(std::size_t count) {
    std::vector<double> primes;
    primes.reserve(count);
    for (long cand = 2; primes.size() < count; ++cand) {
        bool is_prime = true;
        for (long f = 2; f * f <= cand; ++f) {
            if (cand % f == 0) {
                is_prime = false;
                break;
            }
        }
        if (is_prime) primes.push_back(static_cast<double>(cand));
    }
    return primes;
}

/// One attempt at the reordered factorization; returns false on a non-positive pivot.
bool try_reorder_factor(MatrixXd sigma, VectorXd a, VectorXd b, ReorderedCholesky& out) {
    const Eigen::Index d = sigma.rows();
    const double pivot_floor = 1e-15 * sigma.diagonal().cwiseAbs().maxCoeff();
    MatrixXd L = MatrixXd::Zero(d, d);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    VectorXd cond_var = sigma.diagonal();
    VectorXd cond_mean = VectorXd::Zero(d);

    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::Index best = i;
        double best_prob = kInf;
        for (Eigen::Index j = i; j < d; ++j) {
            if (cond_var(j) <= pivot_floor) continue;
            const double s = std::sqrt(cond_var(j));
            const double prob =
                normal::interval((a(j) - cond_mean(j)) / s, (b(j) - cond_mean(j)) / s);
            if (prob < best_prob) {
                best_prob = prob;
                best = j;
            }
        }
        if (cond_var(best) <= pivot_floor) return false;

        if (best != i) {
            sigma.row(i).swap(sigma.row(best));
            sigma.col(i).swap(sigma.col(best));
            L.row(i).swap(L.row(best));
            std::swap(a(i), a(best));
            std::swap(b(i), b(best));
            std::swap(cond_var(i), cond_var(best));
            std::swap(cond_mean(i), cond_mean(best));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(best)]);
        }

        const double lii = std::sqrt(cond_var(i));
        L(i, i) = lii;
        for (Eigen::Index r = i + 1; r < d; ++r) {
            const double dot = i == 0 ? 0.0 : L.row(r).head(i).dot(L.row(i).head(i));
            L(r, i) = (sigma(r, i) - dot) / lii;
        }

        const double lo = (a(i) - cond_mean(i)) / lii;
        const double hi = (b(i) - cond_mean(i)) / lii;
        const double y = truncated_mean(lo, hi, normal::interval(lo, hi));
        for (Eigen::Index r = i + 1; r < d; ++r) {
            cond_var(r) -= L(r, i) * L(r, i);
            cond_mean(r) += L(r, i) * y;
        }
    }
    out.L = std::move(L);
    out.perm = std::move(perm);
    return true;
}

/// Sequential-conditioning integrand over the unit cube of dimension d-1.
class GenzIntegrand {
public:
    GenzIntegrand(RowMatrix L, VectorXd a, VectorXd b)
        : L_(std::move(L)), a_(std::move(a)), b_(std::move(b)), y_(a_.size()) {
        const Eigen::Index d = a_.size();
        inv_diag_.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) inv_diag_(i) = 1.0 / L_(i, i);
        first_ = interval_parts(a_(0) * inv_diag_(0), b_(0) * inv_diag_(0));
    }

    double operator()(const double* w) {
        const Eigen::Index d = a_.size();
        Parts parts = first_;
        double value = parts.mass;
        for (Eigen::Index i = 1; i < d; ++i) {
            if (value <= 0.0) return 0.0;
            y_(i - 1) = parts.sample(w[i - 1]);
            const double mu = L_.row(i).head(i).dot(y_.head(i));
            parts = interval_parts((a_(i) - mu) * inv_diag_(i), (b_(i) - mu) * inv_diag_(i));
            value *= parts.mass;
        }
        return value;
    }

private:
    // Interval [lo, hi] of a standard normal, stored in whichever tail keeps
    // the CDF differences well conditioned.
    struct Parts {
        double lo_cdf = 0.0;
        double mass = 0.0;
        bool upper_tail = false;

        double sample(double w) const {
            constexpr double kMaxArg = 1.0 - 0x1.0p-53;
            double arg = std::clamp(lo_cdf + w * mass, std::numeric_limits<double>::min(), kMaxArg);
            const double z = normal::quantile(arg);
            return upper_tail ? -z : z;
        }
    };

    static Parts interval_parts(double lo, double hi) {
        Parts p;
        if (lo > 0.0) {
            // Mirror into the lower tail: Z in [lo, hi]  <=>  -Z in [-hi, -lo].
            p.upper_tail = true;
            p.lo_cdf = normal::cdf(-hi);
            p.mass = std::max(0.0, normal::cdf(-lo) - p.lo_cdf);
        } else {
            p.lo_cdf = normal::cdf(lo);
            p.mass = std::max(0.0, normal::cdf(hi) - p.lo_cdf);
        }
        return p;
    }

    RowMatrix L_;
    VectorXd a_;
    VectorXd b_;
    VectorXd inv_diag_;
    VectorXd y_;
    Parts first_;
};

}  // namespace

void QuadConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("QuadConfig: eps must lie in (0, 1)");
    if (shifts < 2) throw std::invalid_argument("QuadConfig: shifts must be at least 2");
    if (max_samples < shifts) throw std::invalid_argument("QuadConfig: max_samples must be >= shifts");
}

ReorderedCholesky cholesky_with_reorder(const GaussianVector& g, const Box& box) {
    const Eigen::Index d = g.dim();
    if (d == 0 || g.covariance.rows() != d || g.covariance.cols() != d) {
        throw std::invalid_argument("cholesky_with_reorder: covariance shape does not match mean");
    }
    if (box.dim() != d) throw std::invalid_argument("cholesky_with_reorder: box dimension mismatch");

    const VectorXd a = box.lower() - g.mean;
    const VectorXd b = box.upper() - g.mean;
    ReorderedCholesky out;
    if (try_reorder_factor(g.covariance, a, b, out)) return out;

    MatrixXd jittered = g.covariance;
    jittered.diagonal().array() += 1e-12 * g.covariance.trace() / static_cast<double>(d);
    if (try_reorder_factor(jittered, a, b, out)) return out;
    throw FactorizationError("cholesky_with_reorder: covariance is not positive definite after jitter");
}

namespace {

QuadResult estimate(const GaussianVector& g, const Box& box, const QuadConfig& cfg,
                    std::int64_t fixed_points) {
    cfg.validate();
    const Eigen::Index d = g.dim();
    if (g.covariance.rows() != d || g.covariance.cols() != d) {
        throw std::invalid_argument("mvn_box_probability: covariance shape does not match mean");
    }
    if (box.dim() != d) throw std::invalid_argument("mvn_box_probability: box dimension mismatch");

    if (box.empty()) return {};

    // Coordinates unconstrained on both sides marginalize out exactly.
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (box.lower()(i) == box.upper()(i)) return {};
        if (!(std::isinf(box.lower()(i)) && std::isinf(box.upper()(i)))) active.push_back(i);
    }
    if (active.empty()) return {1.0, 0.0, 0};

    const auto k = static_cast<Eigen::Index>(active.size());
    GaussianVector sub{VectorXd(k), MatrixXd(k, k)};
    VectorXd lo(k), hi(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        sub.mean(r) = g.mean(active[r]);
        lo(r) = box.lower()(active[r]);
        hi(r) = box.upper()(active[r]);
        for (Eigen::Index c = 0; c < k; ++c) sub.covariance(r, c) = g.covariance(active[r], active[c]);
    }
    const Box sub_box(lo, hi);
    const ReorderedCholesky fac = cholesky_with_reorder(sub, sub_box);

    VectorXd a(k), b(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index src = fac.perm[static_cast<std::size_t>(r)];
        a(r) = lo(src) - sub.mean(src);
        b(r) = hi(src) - sub.mean(src);
    }

    if (k == 1) {
        const double s = fac.L(0, 0);
        return {std::clamp(normal::interval(a(0) / s, b(0) / s), 0.0, 1.0), 0.0, 0};
    }

    const std::size_t dims = static_cast<std::size_t>(k - 1);
    const std::vector<double> primes = first_primes(dims);
    std::vector<double> generator(dims);
    for (std::size_t j = 0; j < dims; ++j) {
        const double r = std::sqrt(primes[j]);
        generator[j] = r - std::floor(r);
    }

    const int shifts = cfg.shifts;
    std::vector<std::vector<double>> shift_vectors(static_cast<std::size_t>(shifts));
    for (int s = 0; s < shifts; ++s) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
        auto& v = shift_vectors[static_cast<std::size_t>(s)];
        v.resize(dims);
        for (auto& x : v) x = uniform_open01(rng);
    }

    GenzIntegrand integrand(fac.L, a, b);
    std::vector<double> sums(static_cast<std::size_t>(shifts), 0.0);
    std::vector<double> w(dims), w_anti(dims);

    const std::int64_t per_shift_cap = fixed_points > 0 ? fixed_points : cfg.max_samples / shifts;
    std::int64_t done = 0;
    std::int64_t target = fixed_points > 0 ? fixed_points : std::min<std::int64_t>(1000, per_shift_cap);
    QuadResult res;
    while (true) {
        for (int s = 0; s < shifts; ++s) {
            const auto& shift = shift_vectors[static_cast<std::size_t>(s)];
            double acc = 0.0;
            for (std::int64_t i = done + 1; i <= target; ++i) {
                const double di = static_cast<double>(i);
                for (std::size_t j = 0; j < dims; ++j) {
                    double x = di * generator[j] + shift[j];
                    x -= std::floor(x);
                    const double tent = 1.0 - std::fabs(2.0 * x - 1.0);
                    w[j] = tent;
                    w_anti[j] = 1.0 - tent;
                }
                acc += 0.5 * (integrand(w.data()) + integrand(w_anti.data()));
            }
            sums[static_cast<std::size_t>(s)] += acc;
        }
        done = target;

        double mean = 0.0;
        for (double sum : sums) mean += sum / static_cast<double>(done);
        mean /= shifts;
        double var = 0.0;
        for (double sum : sums) {
            const double dev = sum / static_cast<double>(done) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(shifts - 1);

        res.p = std::clamp(mean, 0.0, 1.0);
        res.err_est = 3.0 * std::sqrt(var / shifts);
        res.samples_used = done * shifts;

        if (fixed_points > 0 || res.err_est <= cfg.eps) break;
        const std::int64_t next = std::min<std::int64_t>(2 * done, per_shift_cap);
        if (next <= done) break;
        target = next;
    }
    return res;
}

}  // namespace

QuadResult mvn_box_probability(const GaussianVector& g, const Box& box, const QuadConfig& cfg) {
    return estimate(g, box, cfg, 0);
}

QuadResult mvn_box_probability_fixed(const GaussianVector& g, const Box& box, const QuadConfig& cfg,
                                     std::int64_t points_per_shift) {
    if (points_per_shift < 1) throw std::invalid_argument("mvn_box_probability_fixed: need at least one point per shift");
    return estimate(g, box, cfg, points_per_shift);
}

}  // namespace reachkit
