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

#ifndef REACHKIT_PROBLEM_HPP
#define REACHKIT_PROBLEM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reachkit/dp_baseline.hpp"
#include "reachkit/solvers.hpp"

namespace reachkit {

/// Problem document is malformed or dimensionally inconsistent.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MonteCarloConfig {
    std::int64_t samples = 100000;
    std::uint64_t seed = 7;
};

/// A parsed problem file: one query template plus the initial states to run
/// it from and every solver/quadrature/DP setting.
struct Problem {
    std::string name;
    ReachAvoidQuery query;  ///< x0 is the first point
    std::vector<VectorXd> points;
    bool sweep = false;
    SolverConfig solver;
    QuadConfig quad;
    std::optional<GridSpec> dp;  ///< absent: DP defaults for the state dimension
    MonteCarloConfig monte_carlo;
    std::uint64_t seed = 1;

    ReachAvoidQuery query_at(const VectorXd& x0) const;
    GridSpec dp_grid() const;
};

/// Parses a problem document. Throws SchemaError with a path-like message.
Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::string& path);

/// Overrides every component seed from one master seed.
void apply_master_seed(Problem& problem, std::uint64_t seed);

nlohmann::ordered_json box_to_json(const Box& box);
nlohmann::ordered_json vector_to_json(const VectorXd& v);

}  // namespace reachkit

#endif  // REACHKIT_PROBLEM_HPP
