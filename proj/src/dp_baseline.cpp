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

#include "reachkit/dp_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reachkit/parallel.hpp"

namespace reachkit {

namespace {

struct Axis {
    double lower = 0.0;
    double spacing = 1.0;
    std::int64_t count = 1;

    double node(std::int64_t j) const { return lower + static_cast<double>(j) * spacing; }
};

std::int64_t axis_count(double lo, double hi, double spacing) {
    return static_cast<std::int64_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
}

std::vector<Axis> grid_axes(const Box& box, double spacing) {
    std::vector<Axis> axes;
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
        axes.push_back({box.lower()(i), spacing, axis_count(box.lower()(i), box.upper()(i), spacing)});
    }
    return axes;
}

/// Successor coordinate -> weighted node references along one axis.
struct AxisRef {
    std::int64_t first = -1;  ///< -1: outside the safe set
    std::int64_t second = 0;
    double frac = 0.0;        ///< weight of `second`
};

AxisRef locate(const Axis& axis, double y, double safe_lo, double safe_hi, bool interpolate) {
    AxisRef ref;
    if (y < safe_lo || y > safe_hi) return ref;
    const double t = (y - axis.lower) / axis.spacing;
    if (!interpolate) {
        // Exact half-way ties go toward the centre of the safe interval so that
        // snapping commutes with reflections of a centred grid.
        const double centre = 0.5 * (static_cast<double>(axis.count) - 1.0);
        const double down = std::floor(t);
        const double r = t - down;
        double idx = r < 0.5 ? down : down + 1.0;
        if (std::fabs(r - 0.5) < 1e-9) idx = (down + 0.5 < centre) ? down + 1.0 : down;
        ref.first = std::clamp<std::int64_t>(static_cast<std::int64_t>(idx), 0, axis.count - 1);
        ref.second = ref.first;
        return ref;
    }
    if (axis.count == 1) {
        ref.first = ref.second = 0;
        return ref;
    }
    const std::int64_t i0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(t)), 0, axis.count - 2);
    ref.first = i0;
    ref.second = i0 + 1;
    ref.frac = std::clamp(t - static_cast<double>(i0), 0.0, 1.0);
    return ref;
}

}  // namespace

std::int64_t ValueGrid::node_count() const {
    std::int64_t total = 1;
    for (auto c : counts) total *= c;
    return total;
}

VectorXd ValueGrid::node(std::int64_t flat) const {
    const Eigen::Index n = state_dim();
    VectorXd x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        const auto c = counts[static_cast<std::size_t>(i)];
        x(i) = lower(i) + static_cast<double>(flat % c) * spacing;
        flat /= c;
    }
    return x;
}

std::int64_t ValueGrid::flat_index(const std::vector<std::int64_t>& multi) const {
    std::int64_t flat = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) flat = flat * counts[i] + multi[i];
    return flat;
}

double dp_node_values(const ReachAvoidQuery& query, const GridSpec& grid) {
    if (!(grid.state_spacing > 0.0)) throw std::invalid_argument("GridSpec: state spacing must be positive");
    if (!query.safe.bounded()) throw std::invalid_argument("dp_solve: safe set must be bounded");
    double nodes = 1.0;
    for (Eigen::Index i = 0; i < query.safe.dim(); ++i) {
        nodes *= std::floor((query.safe.upper()(i) - query.safe.lower()(i)) / grid.state_spacing + 1e-9) + 1.0;
    }
    return nodes * (query.horizon + 1);
}

DisturbanceGrid discretize_disturbance(const GaussianDisturbance& w, const GridSpec& grid) {
    const Eigen::Index n = w.mean.size();
    const Box& box = grid.disturbance_box;
    if (box.dim() != n) throw std::invalid_argument("GridSpec: disturbance box dimension mismatch");
    if (!box.bounded() || box.empty()) throw std::invalid_argument("GridSpec: disturbance box must be bounded and nonempty");
    if (!box.contains(w.mean)) throw std::invalid_argument("GridSpec: disturbance box must contain the disturbance mean");
    if (!(grid.disturbance_spacing > 0.0)) throw std::invalid_argument("GridSpec: disturbance spacing must be positive");

    std::vector<std::vector<double>> mids(static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double width = box.upper()(i) - box.lower()(i);
        const auto cells = std::max<std::int64_t>(1, std::llround(width / grid.disturbance_spacing));
        const double cw = width / static_cast<double>(cells);
        for (std::int64_t j = 0; j < cells; ++j) mids[i].push_back(box.lower()(i) + (static_cast<double>(j) + 0.5) * cw);
        total *= mids[i].size();
    }

    const MatrixXd precision = w.covariance.inverse();
    DisturbanceGrid out;
    out.points.reserve(total);
    out.weights.reserve(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    double sum = 0.0;
    for (std::size_t f = 0; f < total; ++f) {
        VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = mids[i][idx[i]];
        const VectorXd d = p - w.mean;
        const double weight = std::exp(-0.5 * d.dot(precision * d));
        out.points.push_back(p);
        out.weights.push_back(weight);
        sum += weight;
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            if (++idx[i] < mids[i].size()) break;
            idx[i] = 0;
        }
    }
    for (auto& wt : out.weights) wt /= sum;
    return out;
}

ValueGrid dp_solve(const ReachAvoidQuery& query, const GridSpec& grid, int threads) {
    query.validate();
    const double node_values = dp_node_values(query, grid);
    if (node_values > kDpMaxNodeValues) {
        std::ostringstream msg;
        msg << "dp_solve: grid needs " << node_values << " node values (~" << node_values * 8.0 / (1 << 30)
            << " GiB), above the limit of " << kDpMaxNodeValues
            << "; increase state_spacing or shrink the safe set";
        throw DpGridTooLarge(msg.str(), node_values);
    }
    const LtiSystem& sys = query.system;
    const Eigen::Index n = sys.state_dim();
    const Eigen::Index m = sys.input_dim();
    if (n > 3) throw std::invalid_argument("dp_solve: state dimension above 3 is not supported");
    if (!sys.input_box().bounded()) throw std::invalid_argument("dp_solve: input set must be bounded");
    if (!(grid.input_spacing > 0.0)) throw std::invalid_argument("GridSpec: input spacing must be positive");
    const DisturbanceGrid dist = discretize_disturbance(sys.disturbance().as_gaussian(), grid);

    const std::vector<Axis> axes = grid_axes(query.safe, grid.state_spacing);
    const std::vector<Axis> uaxes = grid_axes(sys.input_box(), grid.input_spacing);

    ValueGrid out;
    out.horizon = query.horizon;
    out.spacing = grid.state_spacing;
    out.lower.resize(n);
    out.upper.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.counts.push_back(axes[i].count);
        out.lower(i) = axes[i].lower;
        out.upper(i) = axes[i].node(axes[i].count - 1);
    }
    const std::int64_t nodes = out.node_count();
    std::vector<std::int64_t> strides(static_cast<std::size_t>(n), 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) strides[i] = strides[i + 1] * axes[i + 1].count;

    // Input grid as a flat list, lowest index first.
    std::vector<VectorXd> Bu;
    {
        std::int64_t total = 1;
        for (const auto& ax : uaxes) total *= ax.count;
        for (std::int64_t f = 0; f < total; ++f) {
            VectorXd u(m);
            std::int64_t rem = f;
            for (Eigen::Index i = m - 1; i >= 0; --i) {
                u(i) = uaxes[i].node(rem % uaxes[i].count);
                rem /= uaxes[i].count;
            }
            Bu.push_back(sys.B() * u);
        }
    }

    std::vector<VectorXd> node_images(static_cast<std::size_t>(nodes));
    for (std::int64_t f = 0; f < nodes; ++f) node_images[f] = sys.A() * out.node(f);

    out.values.assign(static_cast<std::size_t>(query.horizon) + 1, std::vector<double>(nodes, 0.0));
    for (std::int64_t f = 0; f < nodes; ++f) out.values.back()[f] = query.target.contains(out.node(f)) ? 1.0 : 0.0;

    const std::size_t corners = grid.interpolate ? (std::size_t{1} << n) : 1;
    const std::size_t wcount = dist.points.size();
    constexpr std::int64_t kChunk = 256;
    const std::size_t chunks = static_cast<std::size_t>((nodes + kChunk - 1) / kChunk);

    for (int k = query.horizon - 1; k >= 0; --k) {
        const std::vector<double>& next = out.values[k + 1];
        std::vector<double>& cur = out.values[k];
        parallel_for(chunks, threads, [&](std::size_t c) {
            std::vector<AxisRef> refs(static_cast<std::size_t>(n));
            const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
            const std::int64_t end = std::min(nodes, begin + kChunk);
            for (std::int64_t f = begin; f < end; ++f) {
                double best = -1.0;
                for (const VectorXd& bu : Bu) {
                    const VectorXd z = node_images[f] + bu;
                    double expected = 0.0;
                    for (std::size_t wi = 0; wi < wcount; ++wi) {
                        const VectorXd& w = dist.points[wi];
                        bool inside = true;
                        for (Eigen::Index i = 0; i < n && inside; ++i) {
                            refs[i] = locate(axes[i], z(i) + w(i), query.safe.lower()(i), query.safe.upper()(i),
                                             grid.interpolate);
                            inside = refs[i].first >= 0;
                        }
                        if (!inside) continue;
                        double value = 0.0;
                        for (std::size_t corner = 0; corner < corners; ++corner) {
                            double weight = 1.0;
                            std::int64_t flat = 0;
                            for (Eigen::Index i = 0; i < n; ++i) {
                                const bool hi = (corner >> i) & 1U;
                                if (grid.interpolate) weight *= hi ? refs[i].frac : 1.0 - refs[i].frac;
                                flat += (hi ? refs[i].second : refs[i].first) * strides[i];
                            }
                            if (weight != 0.0) value += weight * next[static_cast<std::size_t>(flat)];
                        }
                        expected += dist.weights[wi] * value;
                    }
                    if (expected > best) best = expected;
                }
                cur[static_cast<std::size_t>(f)] = std::clamp(best, 0.0, 1.0);
            }
        });
    }
    return out;
}

double dp_value_at(const ValueGrid& grid, const VectorXd& x0) {
    const Eigen::Index n = grid.state_dim();
    if (x0.size() != n) throw std::invalid_argument("dp_value_at: dimension mismatch");
    if (grid.values.empty()) throw std::invalid_argument("dp_value_at: empty value grid");
    const double tol = 1e-9 * grid.spacing;
    std::vector<std::int64_t> base(static_cast<std::size_t>(n));
    std::vector<double> frac(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x0(i) < grid.lower(i) - tol || x0(i) > grid.upper(i) + tol) {
            throw std::out_of_range("dp_value_at: point outside the value grid");
        }
        const auto count = grid.counts[static_cast<std::size_t>(i)];
        if (count == 1) {
            base[i] = 0;
            frac[i] = 0.0;
            continue;
        }
        const double t = (x0(i) - grid.lower(i)) / grid.spacing;
        base[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(t)), 0, count - 2);
        frac[i] = std::clamp(t - static_cast<double>(base[i]), 0.0, 1.0);
    }

    // Collapse one dimension at a time, last dimension first.
    const std::vector<double>& v0 = grid.values.front();
    std::vector<double> cell(std::size_t{1} << n);
    std::vector<std::int64_t> multi(static_cast<std::size_t>(n));
    for (std::size_t corner = 0; corner < cell.size(); ++corner) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool hi = (corner >> (n - 1 - i)) & 1U;
            multi[i] = std::min(base[i] + (hi ? 1 : 0), grid.counts[i] - 1);
        }
        cell[corner] = v0[static_cast<std::size_t>(grid.flat_index(multi))];
    }
    std::size_t width = cell.size();
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        width /= 2;
        for (std::size_t j = 0; j < width; ++j) {
            cell[j] = (1.0 - frac[i]) * cell[2 * j] + frac[i] * cell[2 * j + 1];
        }
    }
    return cell[0];
}

}  // namespace reachkit
