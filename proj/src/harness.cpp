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

#include "reachkit/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "reachkit/parallel.hpp"
#include "reachkit/random.hpp"

#ifndef REACHKIT_VERSION
#define REACHKIT_VERSION "0.0.0"
#endif

namespace reachkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolverMethod solver_method_of(Method m) {
    return m == Method::FtbuSl ? SolverMethod::SmoothLocal : SolverMethod::DirectSearch;
}

Method ftbu_method_of(SolverMethod m) {
    return m == SolverMethod::SmoothLocal ? Method::FtbuSl : Method::FtbuDs;
}

bool is_ftbu(Method m) { return m == Method::FtbuDs || m == Method::FtbuSl; }

std::vector<std::string> x0_columns(Eigen::Index n) {
    std::vector<std::string> cols;
    for (Eigen::Index i = 0; i < n; ++i) cols.push_back("x0_" + std::to_string(i + 1));
    return cols;
}

void append_numbers(std::vector<std::string>& row, const VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(format_number(v(i)));
}

/// DP value, with the safe-set indicator applied outside the grid.
double dp_lookup(const ValueGrid& grid, const Box& safe, const VectorXd& x0) {
    if (!safe.contains(x0)) return 0.0;
    return dp_value_at(grid, x0);
}

}  // namespace

const char* version() { return REACHKIT_VERSION; }

std::string method_tag(Method method) {
    switch (method) {
        case Method::FtbuDs: return "ftbu-ds";
        case Method::FtbuSl: return "ftbu-sl";
        case Method::Dp: return "dp";
        case Method::Mc: return "mc";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "ds" || name == "ftbu-ds") return Method::FtbuDs;
    if (name == "sl" || name == "ftbu-sl") return Method::FtbuSl;
    if (name == "dp") return Method::Dp;
    if (name == "mc") return Method::Mc;
    throw std::invalid_argument("unknown method '" + name + "' (expected ds, sl, dp or mc)");
}

std::vector<Method> parse_method_list(const std::string& comma_separated) {
    std::vector<Method> out;
    std::stringstream ss(comma_separated);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_method(item));
    }
    if (out.empty()) throw std::invalid_argument("empty method list");
    return out;
}

nlohmann::ordered_json query_echo(const Problem& problem, const VectorXd& x0) {
    const auto& sys = problem.query.system;
    return {
        {"name", problem.name},
        {"state_dim", sys.state_dim()},
        {"input_dim", sys.input_dim()},
        {"horizon", problem.query.horizon},
        {"x0", vector_to_json(x0)},
        {"input_box", box_to_json(sys.input_box())},
        {"safe", box_to_json(problem.query.safe)},
        {"target", box_to_json(problem.query.target)},
    };
}

nlohmann::ordered_json record_to_json(const ResultRecord& record, const Problem& problem) {
    nlohmann::ordered_json j;
    j["query"] = query_echo(problem, record.x0);
    j["method"] = method_tag(record.method);
    j["probability"] = record.probability;
    j["err"] = record.err ? nlohmann::ordered_json(*record.err) : nlohmann::ordered_json(nullptr);
    j["evals"] = record.evals;
    j["converged"] = record.converged;
    j["wall_time_s"] = std::round(record.wall_time * 1000.0) / 1000.0;
    j["seed"] = record.seed;
    j["version"] = version();
    if (record.U_star) j["U_star"] = vector_to_json(*record.U_star);
    return j;
}

ResultRecord run_point(const Problem& problem, Method method, const VectorXd& x0,
                       const ValueGrid* dp_values, int threads) {
    ResultRecord r;
    r.problem = problem.name;
    r.x0 = x0;
    r.method = method;
    const ReachAvoidQuery q = problem.query_at(x0);
    const auto t0 = Clock::now();
    if (is_ftbu(method)) {
        SolverConfig cfg = problem.solver;
        cfg.method = solver_method_of(method);
        const SolveResult s = solve(q, cfg, problem.quad);
        r.probability = s.p_star.p;
        r.err = s.p_star.err_est;
        r.evals = s.evals;
        r.converged = s.converged;
        r.seed = cfg.seed;
        r.U_star = s.U_star.inputs;
    } else if (method == Method::Mc) {
        const SolveResult s = solve(q, problem.solver, problem.quad);
        const McEstimate mc =
            reach_avoid_probability_mc(q, s.U_star, problem.monte_carlo.samples, problem.monte_carlo.seed, threads);
        r.probability = mc.p_hat;
        r.err = mc.half_width_95;
        r.evals = s.evals;
        r.converged = s.converged;
        r.seed = problem.monte_carlo.seed;
        r.U_star = s.U_star.inputs;
    } else {
        if (dp_values == nullptr) throw std::logic_error("run_point: dp needs a solved value grid");
        r.probability = dp_lookup(*dp_values, q.safe, x0);
        r.evals = 0;
    }
    r.wall_time = seconds_since(t0);
    return r;
}

ResultRecord cmd_solve(const Problem& problem, Method method, int threads) {
    const VectorXd& x0 = problem.points.front();
    if (method != Method::Dp) return run_point(problem, method, x0, nullptr, threads);
    const auto t0 = Clock::now();
    ValueGrid grid;
    if (problem.query.safe.contains(x0)) grid = dp_solve(problem.query_at(x0), problem.dp_grid(), threads);
    ResultRecord r;
    r.problem = problem.name;
    r.x0 = x0;
    r.method = Method::Dp;
    r.probability = grid.values.empty() ? 0.0 : dp_value_at(grid, x0);
    r.wall_time = seconds_since(t0);
    return r;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string CsvTable::to_string() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fields[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void CsvTable::write(const std::string& path, bool append) const {
    bool fresh = true;
    if (append) {
        std::ifstream probe(path, std::ios::binary | std::ios::ate);
        fresh = !probe || probe.tellg() <= 0;
    }
    std::ofstream os(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    std::string text = to_string();
    if (!fresh) text.erase(0, text.find("\r\n") + 2);
    os << text;
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            fields.push_back(std::move(field));
            records.push_back(std::move(fields));
            fields.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw std::runtime_error("parse_csv: unterminated quoted field");
    if (any) {
        fields.push_back(std::move(field));
        records.push_back(std::move(fields));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_csv(ss.str());
}

CsvTable records_to_csv(const std::vector<ResultRecord>& records, Eigen::Index state_dim) {
    CsvTable t;
    t.header = {"problem", "method"};
    for (auto& c : x0_columns(state_dim)) t.header.push_back(c);
    for (const char* c : {"probability", "err", "evals", "converged", "seed", "version", "wall_time_s"}) t.header.push_back(c);
    for (const auto& r : records) {
        std::vector<std::string> row{r.problem, method_tag(r.method)};
        append_numbers(row, r.x0);
        row.push_back(format_number(r.probability));
        row.push_back(r.err ? format_number(*r.err) : "");
        row.push_back(std::to_string(r.evals));
        row.push_back(r.converged ? "true" : "false");
        row.push_back(std::to_string(r.seed));
        row.push_back(version());
        row.push_back(format_seconds(r.wall_time));
        t.rows.push_back(std::move(row));
    }
    return t;
}

GridOutput cmd_grid(const Problem& problem, const std::vector<Method>& methods, int threads) {
    if (methods.empty()) throw std::invalid_argument("cmd_grid: no methods");
    const std::size_t P = problem.points.size();
    const std::size_t M = methods.size();
    const bool want_dp = std::find(methods.begin(), methods.end(), Method::Dp) != methods.end();

    ValueGrid dp_values;
    double dp_time = 0.0;
    if (want_dp) {
        const auto t0 = Clock::now();
        dp_values = dp_solve(problem.query, problem.dp_grid(), threads);
        dp_time = seconds_since(t0);
    }

    std::vector<ResultRecord> records(P * M);
    parallel_for(P * M, threads, [&](std::size_t task) {
        const std::size_t p = task / M;
        const Method m = methods[task % M];
        records[task] = run_point(problem, m, problem.points[p], want_dp ? &dp_values : nullptr, 1);
        if (m == Method::Dp) records[task].wall_time += dp_time;
    });

    GridOutput out;
    out.summary["points"] = P;
    out.summary["eps_clamp"] = problem.solver.eps_clamp;
    nlohmann::ordered_json methods_json = nlohmann::ordered_json::array();
    for (Method m : methods) methods_json.push_back(method_tag(m));
    out.summary["methods"] = methods_json;

    auto column = [&](Method m) -> std::optional<std::size_t> {
        for (std::size_t j = 0; j < M; ++j) {
            if (methods[j] == m) return j;
        }
        return std::nullopt;
    };
    const auto dp_col = column(Method::Dp);
    if (dp_col) {
        nlohmann::ordered_json rel = nlohmann::ordered_json::object();
        for (std::size_t j = 0; j < M; ++j) {
            if (!is_ftbu(methods[j])) continue;
            std::size_t above = 0;
            std::size_t below30 = 0;
            double max_excess = -1.0;
            for (std::size_t p = 0; p < P; ++p) {
                const double V = records[p * M + *dp_col].probability;
                const double W = records[p * M + j].probability;
                max_excess = std::max(max_excess, W - V);
                if (V > problem.solver.eps_clamp) {
                    ++above;
                    if ((V - W) / V * 100.0 < 30.0) ++below30;
                }
            }
            nlohmann::ordered_json e;
            e["points_dp_above_eps"] = above;
            e["fraction_relative_error_below_30"] =
                above ? nlohmann::ordered_json(static_cast<double>(below30) / static_cast<double>(above)) : nlohmann::ordered_json(nullptr);
            e["max_excess_over_dp"] = max_excess;
            rel[method_tag(methods[j])] = e;
        }
        out.summary["relative_error"] = rel;
    }
    const auto ds_col = column(Method::FtbuDs);
    const auto sl_col = column(Method::FtbuSl);
    if (ds_col && sl_col) {
        std::size_t ok = 0;
        for (std::size_t p = 0; p < P; ++p) {
            const auto& ds = records[p * M + *ds_col];
            const auto& sl = records[p * M + *sl_col];
            const double slack = 2.0 * std::max(ds.err.value_or(0.0), sl.err.value_or(0.0));
            if (ds.probability >= sl.probability - slack) ++ok;
        }
        out.summary["fraction_ds_not_worse_than_sl"] = static_cast<double>(ok) / static_cast<double>(P);
    }
    out.records = std::move(records);
    return out;
}

std::vector<BenchRow> cmd_bench(const BenchOptions& options) {
    std::vector<BenchRow> rows;
    for (int n : options.n_list) {
        if (n < 1) throw std::invalid_argument("cmd_bench: n must be positive");
        const auto maps = chain_of_integrators(n, options.sampling);
        LtiSystem sys(maps.A, maps.B,
                      DisturbanceModel::gaussian(VectorXd::Zero(n), options.covariance_scale * MatrixXd::Identity(n, n)),
                      Box::cube(maps.B.cols(), -1.0, 1.0));
        Problem pr{
            "chain-" + std::to_string(n),
            ReachAvoidQuery{sys, Box::cube(n, -options.safe_half_width, options.safe_half_width),
                            Box::cube(n, -options.target_half_width, options.target_half_width), options.horizon,
                            VectorXd::Zero(n)},
            {},
            true,
            {},
            options.quad,
            std::nullopt,
            {},
            options.seed,
        };
        pr.solver.eps_clamp = options.eps_clamp;
        std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(n)));
        for (int i = 0; i < options.points; ++i) {
            VectorXd x(n);
            for (int k = 0; k < n; ++k) {
                x(k) = -options.target_half_width + 2.0 * options.target_half_width * uniform_open01(rng);
            }
            pr.points.push_back(x);
        }
        pr.query.x0 = pr.points.front();

        for (Method m : options.methods) {
            BenchRow row;
            row.n = n;
            row.method = m;
            row.points = options.points;
            if (m == Method::Dp) {
                GridSpec g = options.dp;
                g.disturbance_box = Box::cube(n, -0.5, 0.5);
                row.node_values = dp_node_values(pr.query, g);
                try {
                    const auto t0 = Clock::now();
                    const ValueGrid grid = dp_solve(pr.query, g, options.threads);
                    double sum = 0.0;
                    for (const auto& x : pr.points) sum += dp_lookup(grid, pr.query.safe, x);
                    row.mean_wall_time = seconds_since(t0);
                    row.mean_probability = sum / options.points;
                    row.status = "ok";
                } catch (const DpGridTooLarge&) {
                    row.status = "infeasible-memory";
                } catch (const std::invalid_argument&) {
                    row.status = "infeasible-dimension";
                }
            } else {
                std::vector<ResultRecord> recs(pr.points.size());
                parallel_for(recs.size(), options.threads,
                             [&](std::size_t i) { recs[i] = run_point(pr, m, pr.points[i], nullptr, 1); });
                double p = 0.0;
                double t = 0.0;
                for (const auto& r : recs) {
                    p += r.probability;
                    t += r.wall_time;
                }
                row.mean_probability = p / options.points;
                row.mean_wall_time = t / options.points;
                row.status = "ok";
            }
            rows.push_back(row);
        }
    }
    return rows;
}

CsvTable bench_to_csv(const std::vector<BenchRow>& rows) {
    CsvTable t;
    t.header = {"n", "method", "status", "points", "node_values", "mean_probability", "version", "mean_wall_time_s"};
    for (const auto& r : rows) {
        const bool ok = r.status == "ok";
        t.rows.push_back({std::to_string(r.n), method_tag(r.method), r.status, std::to_string(r.points),
                          r.method == Method::Dp ? format_number(r.node_values) : "",
                          ok ? format_number(r.mean_probability) : "", version(),
                          ok ? format_seconds(r.mean_wall_time) : ""});
    }
    return t;
}

CertificateOutput cmd_certificate(const Problem& problem, const std::vector<double>& spacings, int threads,
                                  const ValueProvider& values) {
    if (spacings.empty()) throw std::invalid_argument("cmd_certificate: no spacings");
    const Method ftbu = ftbu_method_of(problem.solver.method);
    const std::size_t P = problem.points.size();
    std::vector<ResultRecord> bounds(P);
    parallel_for(P, threads, [&](std::size_t i) { bounds[i] = run_point(problem, ftbu, problem.points[i], nullptr, 1); });

    CertificateOutput out;
    nlohmann::ordered_json per_spacing = nlohmann::ordered_json::array();
    for (double s : spacings) {
        if (!(s > 0.0)) throw std::invalid_argument("cmd_certificate: spacing must be positive");
        const auto t0 = Clock::now();
        std::vector<double> v(P);
        if (values) {
            for (std::size_t i = 0; i < P; ++i) v[i] = values(s, problem.points[i]);
        } else {
            GridSpec g = problem.dp_grid();
            g.state_spacing = s;
            const ValueGrid grid = dp_solve(problem.query, g, threads);
            for (std::size_t i = 0; i < P; ++i) v[i] = dp_lookup(grid, problem.query.safe, problem.points[i]);
        }
        const double elapsed = seconds_since(t0);
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < P; ++i) {
            CertificateRow row;
            row.spacing = s;
            row.point = i;
            row.x0 = problem.points[i];
            row.dp_value = v[i];
            row.ftbu_bound = bounds[i].probability;
            row.ftbu_err = bounds[i].err.value_or(0.0);
            row.valid = row.dp_value >= row.ftbu_bound - row.ftbu_err - 1e-9;
            row.wall_time = elapsed;
            if (!row.valid) ++flagged;
            out.rows.push_back(std::move(row));
        }
        per_spacing.push_back({{"spacing", s}, {"valid", flagged == 0}, {"flagged_points", flagged}});
    }
    out.summary["ftbu_method"] = method_tag(ftbu);
    out.summary["points"] = P;
    out.summary["spacings"] = per_spacing;
    return out;
}

CsvTable certificate_to_csv(const CertificateOutput& out, Eigen::Index state_dim) {
    CsvTable t;
    t.header = {"spacing", "point"};
    for (auto& c : x0_columns(state_dim)) t.header.push_back(c);
    for (const char* c : {"dp_value", "ftbu_bound", "ftbu_err", "valid", "version", "wall_time_s"}) t.header.push_back(c);
    for (const auto& r : out.rows) {
        std::vector<std::string> row{format_number(r.spacing), std::to_string(r.point)};
        append_numbers(row, r.x0);
        row.push_back(format_number(r.dp_value));
        row.push_back(format_number(r.ftbu_bound));
        row.push_back(format_number(r.ftbu_err));
        row.push_back(r.valid ? "true" : "false");
        row.push_back(version());
        row.push_back(format_seconds(r.wall_time));
        t.rows.push_back(std::move(row));
    }
    return t;
}

ValidateOutput cmd_validate(const Problem& problem, std::int64_t n_samples, std::uint64_t seed, int threads) {
    const VectorXd& x0 = problem.points.front();
    const ReachAvoidQuery q = problem.query_at(x0);
    const auto t0 = Clock::now();
    const SolveResult s = solve(q, problem.solver, problem.quad);
    const double solve_time = seconds_since(t0);

    ValidateOutput out;
    auto& qr = out.quadrature;
    qr.problem = problem.name;
    qr.x0 = x0;
    qr.method = ftbu_method_of(problem.solver.method);
    const auto t1 = Clock::now();
    const QuadResult quad = reach_avoid_probability(q, s.U_star, problem.quad);
    qr.probability = quad.p;
    qr.err = quad.err_est;
    qr.evals = s.evals;
    qr.converged = s.converged;
    qr.seed = problem.quad.seed;
    qr.U_star = s.U_star.inputs;
    qr.wall_time = solve_time + seconds_since(t1);

    auto& mr = out.monte_carlo;
    mr.problem = problem.name;
    mr.x0 = x0;
    mr.method = Method::Mc;
    const auto t2 = Clock::now();
    const McEstimate mc = reach_avoid_probability_mc(q, s.U_star, n_samples, seed, threads);
    mr.probability = mc.p_hat;
    mr.err = mc.half_width_95;
    mr.evals = mc.n_samples;
    mr.seed = seed;
    mr.U_star = s.U_star.inputs;
    mr.wall_time = seconds_since(t2);

    out.delta = std::abs(quad.p - mc.p_hat);
    out.agree = out.delta <= mc.half_width_95 + quad.err_est;
    return out;
}

nlohmann::ordered_json validate_to_json(const ValidateOutput& out, const Problem& problem) {
    return {
        {"quadrature", record_to_json(out.quadrature, problem)},
        {"monte_carlo", record_to_json(out.monte_carlo, problem)},
        {"delta", out.delta},
        {"agree", out.agree},
    };
}

}  // namespace reachkit
