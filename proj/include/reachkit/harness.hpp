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

#ifndef REACHKIT_HARNESS_HPP
#define REACHKIT_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reachkit/problem.hpp"

namespace reachkit {

/// Process exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumerical = 3;

const char* version();

enum class Method { FtbuDs, FtbuSl, Dp, Mc };

/// ftbu-ds, ftbu-sl, dp, mc
std::string method_tag(Method method);
/// Accepts the short flags ds, sl, dp, mc as well as the tags.
Method parse_method(const std::string& name);
std::vector<Method> parse_method_list(const std::string& comma_separated);

struct ResultRecord {
    std::string problem;
    VectorXd x0;
    Method method = Method::FtbuDs;
    double probability = 0.0;
    std::optional<double> err;  ///< err_est or 95% half-width; none for dp
    std::int64_t evals = 0;
    bool converged = true;
    double wall_time = 0.0;  ///< seconds
    std::uint64_t seed = 0;
    std::optional<VectorXd> U_star;
};

nlohmann::ordered_json query_echo(const Problem& problem, const VectorXd& x0);
nlohmann::ordered_json record_to_json(const ResultRecord& record, const Problem& problem);

/// One point, one method. `dp_values` must be given for Method::Dp.
ResultRecord run_point(const Problem& problem, Method method, const VectorXd& x0,
                       const ValueGrid* dp_values = nullptr, int threads = 1);

ResultRecord cmd_solve(const Problem& problem, Method method, int threads = 1);

// CSV (RFC 4180). Numbers use the shortest round-trip representation;
// wall-clock columns are always last so determinism checks can drop them.

std::string format_number(double v);
std::string format_seconds(double v);
std::string csv_field(const std::string& raw);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    /// Appends rows; writes the header only when the file is new or empty.
    void write(const std::string& path, bool append = false) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

/// Columns: problem, method, x0_1..x0_n, probability, err, evals, converged,
/// seed, version, wall_time_s.
CsvTable records_to_csv(const std::vector<ResultRecord>& records, Eigen::Index state_dim);

struct GridOutput {
    std::vector<ResultRecord> records;  ///< point-major, then method order
    nlohmann::ordered_json summary;
};

/// Relative error (V - W) / V * 100 against the dp rows, over points with
/// V > eps_clamp.
GridOutput cmd_grid(const Problem& problem, const std::vector<Method>& methods, int threads = 1);

struct BenchOptions {
    std::vector<int> n_list{1, 2, 3};
    int points = 20;
    std::uint64_t seed = 1;
    double sampling = 0.1;
    int horizon = 10;
    double safe_half_width = 10.0;
    double target_half_width = 5.0;
    double covariance_scale = 0.01;
    double eps_clamp = 0.01;
    QuadConfig quad;
    GridSpec dp;  ///< disturbance_box is replaced by [-0.5, 0.5]^n
    std::vector<Method> methods{Method::FtbuDs, Method::Dp};
    int threads = 1;
};

struct BenchRow {
    int n = 0;
    Method method = Method::FtbuDs;
    std::string status;  ///< ok | infeasible-memory | infeasible-dimension
    int points = 0;
    double mean_probability = 0.0;
    double node_values = 0.0;
    double mean_wall_time = 0.0;
};

std::vector<BenchRow> cmd_bench(const BenchOptions& options);
CsvTable bench_to_csv(const std::vector<BenchRow>& rows);

struct CertificateRow {
    double spacing = 0.0;
    std::size_t point = 0;
    VectorXd x0;
    double dp_value = 0.0;
    double ftbu_bound = 0.0;
    double ftbu_err = 0.0;
    bool valid = true;
    double wall_time = 0.0;  ///< DP solve time for this spacing
};

/// Value of Problem A at x0 for a given state spacing. Defaults to DP.
using ValueProvider = std::function<double(double spacing, const VectorXd& x0)>;

struct CertificateOutput {
    std::vector<CertificateRow> rows;
    nlohmann::ordered_json summary;
};

/// A point is invalid when the DP value falls below the FTBU lower bound
/// by more than the bound's error estimate.
CertificateOutput cmd_certificate(const Problem& problem, const std::vector<double>& spacings,
                                  int threads = 1, const ValueProvider& values = {});
CsvTable certificate_to_csv(const CertificateOutput& out, Eigen::Index state_dim);

struct ValidateOutput {
    ResultRecord quadrature;
    ResultRecord monte_carlo;
    double delta = 0.0;
    bool agree = false;
};

/// Finds U* with the problem's solver, then compares quadrature and MC there.
ValidateOutput cmd_validate(const Problem& problem, std::int64_t n_samples, std::uint64_t seed,
                            int threads = 1);
nlohmann::ordered_json validate_to_json(const ValidateOutput& out, const Problem& problem);

}  // namespace reachkit

#endif  // REACHKIT_HARNESS_HPP
