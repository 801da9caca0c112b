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

#include "reachkit/box.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace reachkit {

Box::Box(VectorXd lower, VectorXd upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) {
        throw std::invalid_argument("Box: lower and upper have different dimensions");
    }
    if (lower_.size() == 0) {
        throw std::invalid_argument("Box: dimension must be positive");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
        if (std::isnan(lower_(i)) || std::isnan(upper_(i))) {
            throw std::invalid_argument("Box: NaN bound");
        }
    }
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
    return Box(VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi));
}

Box Box::whole(Eigen::Index dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return cube(dim, -inf, inf);
}

bool Box::empty() const { return (lower_.array() > upper_.array()).any(); }

bool Box::bounded() const { return lower_.allFinite() && upper_.allFinite(); }

bool Box::contains(const Eigen::Ref<const VectorXd>& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("Box::contains: dimension mismatch");
    }
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

bool Box::contains(const Box& other) const {
    if (other.dim() != dim()) {
        throw std::invalid_argument("Box::contains: dimension mismatch");
    }
    if (other.empty()) return true;
    return (other.lower_.array() >= lower_.array()).all() &&
           (other.upper_.array() <= upper_.array()).all();
}

VectorXd Box::clip(const Eigen::Ref<const VectorXd>& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("Box::clip: dimension mismatch");
    }
    return x.cwiseMax(lower_).cwiseMin(upper_);
}

VectorXd Box::center() const {
    VectorXd c(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
        const bool lo_inf = std::isinf(lower_(i));
        const bool hi_inf = std::isinf(upper_(i));
        if (lo_inf && hi_inf) {
            c(i) = 0.0;
        } else if (lo_inf) {
            c(i) = upper_(i);
        } else if (hi_inf) {
            c(i) = lower_(i);
        } else {
            c(i) = 0.5 * (lower_(i) + upper_(i));
        }
    }
    return c;
}

VectorXd Box::width() const { return upper_ - lower_; }

Box Box::translated(const Eigen::Ref<const VectorXd>& shift) const {
    return Box(lower_ + shift, upper_ + shift);
}

Box repeat(const Box& box, int copies) {
    if (copies < 1) {
        throw std::invalid_argument("repeat: copies must be positive");
    }
    const Eigen::Index d = box.dim();
    VectorXd lo(d * copies), hi(d * copies);
    for (int k = 0; k < copies; ++k) {
        lo.segment(k * d, d) = box.lower();
        hi.segment(k * d, d) = box.upper();
    }
    return Box(std::move(lo), std::move(hi));
}

}  // namespace reachkit
