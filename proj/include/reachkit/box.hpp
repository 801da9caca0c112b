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

#ifndef REACHKIT_BOX_HPP
#define REACHKIT_BOX_HPP

#include <Eigen/Dense>

namespace reachkit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/**
 * Axis-aligned hyper-rectangle {x : lower <= x <= upper}.
 *
 * Bounds may be +/-infinity, so the whole space is representable as a box.
 * A box with lower(i) > upper(i) for some i is the empty set; constructors
 * accept it so that queries with an empty target can be posed and evaluated.
 */
class Box {
public:
    Box() = default;
    Box(VectorXd lower, VectorXd upper);

    /// [lo, hi]^dim.
    static Box cube(Eigen::Index dim, double lo, double hi);
    /// (-inf, inf)^dim.
    static Box whole(Eigen::Index dim);

    const VectorXd& lower() const { return lower_; }
    const VectorXd& upper() const { return upper_; }
    Eigen::Index dim() const { return lower_.size(); }

    bool empty() const;
    bool bounded() const;
    bool contains(const Eigen::Ref<const VectorXd>& x) const;
    bool contains(const Box& other) const;

    VectorXd clip(const Eigen::Ref<const VectorXd>& x) const;
    VectorXd center() const;
    VectorXd width() const;

    Box translated(const Eigen::Ref<const VectorXd>& shift) const;

private:
    VectorXd lower_;
    VectorXd upper_;
};

/// Cartesian product of `copies` copies of `box` (stacked block-wise).
Box repeat(const Box& box, int copies);

}  // namespace reachkit

#endif  // REACHKIT_BOX_HPP
