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

#ifndef REACHKIT_NORMAL_HPP
#define REACHKIT_NORMAL_HPP

namespace reachkit::normal {

/// Standard normal density.
double pdf(double x);

/// Standard normal CDF. Exact limits at +/-infinity.
double cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241, ~1e-16 relative accuracy).
/// Returns -inf at 0 and +inf at 1.
double quantile(double p);

/// P(a <= Z <= b) for standard normal Z, computed in the tail that avoids
/// cancellation.
double interval(double a, double b);

}  // namespace reachkit::normal

#endif  // REACHKIT_NORMAL_HPP
