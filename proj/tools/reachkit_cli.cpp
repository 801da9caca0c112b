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

// reachkit command-line tool: solve, grid, bench, certificate, validate.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reachkit/harness.hpp"
#include "reachkit/parallel.hpp"

using namespace reachkit;

namespace {

struct Common {
    std::string problem;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_problem = true) {
    auto* opt = cmd->add_option("--problem", c.problem, "problem JSON file");
    if (needs_problem) opt->required();
    cmd->add_option("--eps", c.eps, "clamping epsilon of the log objective");
    cmd->add_option("--seed", c.seed, "master seed; overrides every seed in the problem file");
    cmd->add_option("--out", c.out, "CSV output path");
    cmd->add_option("--threads", c.threads, "worker threads (default: REACHKIT_THREADS, else all cores)");
}

Problem load(const Common& c) {
    Problem p = load_problem(c.problem);
    if (c.seed) apply_master_seed(p, *c.seed);
    if (c.eps) {
        if (!(*c.eps > 0.0 && *c.eps < 1.0)) throw SchemaError("--eps must lie in (0, 1)");
        p.solver.eps_clamp = *c.eps;
    }
    return p;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw SchemaError("not a number: '" + item + "'");
        }
    }
    return out;
}

Method method_or_throw(const std::string& s) {
    try {
        return parse_method(s);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

std::vector<Method> methods_or_throw(const std::string& s) {
    try {
        return parse_method_list(s);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic reach-avoid lower bounds for LTI systems"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Common solve_c;
    std::string solve_method;
    std::string value_grid;
    auto* solve_cmd = app.add_subcommand("solve", "solve one query and print a JSON record");
    add_common(solve_cmd, solve_c);
    solve_cmd->add_option("--method", solve_method, "ds, sl, dp or mc (default: solver.method of the file)");
    solve_cmd->add_option("--value-grid", value_grid, "dp only: write the value grid to this path");

    Common grid_c;
    std::string grid_methods = "ds,sl,dp";
    auto* grid_cmd = app.add_subcommand("grid", "sweep every point of the problem with several methods");
    add_common(grid_cmd, grid_c);
    grid_cmd->add_option("--methods", grid_methods, "comma-separated methods")->capture_default_str();

    Common bench_c;
    BenchOptions bench;
    std::string bench_n = "1,2,3";
    std::string bench_methods = "ds,dp";
    auto* bench_cmd = app.add_subcommand("bench", "time FTBU and DP on chains of integrators");
    add_common(bench_cmd, bench_c, false);
    bench_cmd->add_option("--n", bench_n, "comma-separated state dimensions")->capture_default_str();
    bench_cmd->add_option("--methods", bench_methods, "comma-separated methods")->capture_default_str();
    bench_cmd->add_option("--points", bench.points, "random initial states per n")->capture_default_str();
    bench_cmd->add_option("--sampling", bench.sampling, "sampling time of the chain")->capture_default_str();
    bench_cmd->add_option("--horizon", bench.horizon)->capture_default_str();
    bench_cmd->add_option("--dp-state-spacing", bench.dp.state_spacing)->capture_default_str();
    bench_cmd->add_option("--dp-input-spacing", bench.dp.input_spacing)->capture_default_str();
    bench_cmd->add_option("--dp-disturbance-spacing", bench.dp.disturbance_spacing)->capture_default_str();

    Common cert_c;
    std::string spacings = "0.1,0.05";
    auto* cert_cmd = app.add_subcommand("certificate", "check DP values against the FTBU lower bound");
    add_common(cert_cmd, cert_c);
    cert_cmd->add_option("--spacings", spacings, "comma-separated DP state spacings")->capture_default_str();

    Common val_c;
    std::int64_t samples = 100000;
    auto* val_cmd = app.add_subcommand("validate", "compare quadrature and Monte Carlo at the optimizer");
    add_common(val_cmd, val_c);
    val_cmd->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitSchema;
    }

    try {
        if (*solve_cmd) {
            const Problem p = load(solve_c);
            if (p.sweep) throw SchemaError("solve needs a single x0; use grid for sweeps");
            const Method m = solve_method.empty()
                                 ? (p.solver.method == SolverMethod::SmoothLocal ? Method::FtbuSl : Method::FtbuDs)
                                 : method_or_throw(solve_method);
            const int threads = resolve_threads(solve_c.threads);
            ResultRecord r;
            if (m == Method::Dp && !value_grid.empty()) {
                const ValueGrid g = dp_solve(p.query, p.dp_grid(), threads);
                write_value_grid(g, value_grid, query_echo(p, p.query.x0).dump());
            }
            r = cmd_solve(p, m, threads);
            std::cout << record_to_json(r, p).dump(2) << "\n";
            if (!solve_c.out.empty()) records_to_csv({r}, p.query.system.state_dim()).write(solve_c.out, true);
        } else if (*grid_cmd) {
            const Problem p = load(grid_c);
            const GridOutput g = cmd_grid(p, methods_or_throw(grid_methods), resolve_threads(grid_c.threads));
            const CsvTable t = records_to_csv(g.records, p.query.system.state_dim());
            if (grid_c.out.empty()) {
                std::cout << t.to_string();
                std::cerr << g.summary.dump(2) << "\n";
            } else {
                t.write(grid_c.out);
                std::cout << g.summary.dump(2) << "\n";
            }
        } else if (*bench_cmd) {
            std::vector<int> ns;
            for (double v : parse_doubles(bench_n)) ns.push_back(static_cast<int>(v));
            bench.n_list = ns;
            bench.methods = methods_or_throw(bench_methods);
            if (bench_c.seed) bench.seed = *bench_c.seed;
            if (bench_c.eps) bench.eps_clamp = *bench_c.eps;
            bench.threads = resolve_threads(bench_c.threads);
            const CsvTable t = bench_to_csv(cmd_bench(bench));
            if (bench_c.out.empty()) {
                std::cout << t.to_string();
            } else {
                t.write(bench_c.out);
            }
        } else if (*cert_cmd) {
            const Problem p = load(cert_c);
            const CertificateOutput c = cmd_certificate(p, parse_doubles(spacings), resolve_threads(cert_c.threads));
            const CsvTable t = certificate_to_csv(c, p.query.system.state_dim());
            if (cert_c.out.empty()) {
                std::cout << t.to_string();
                std::cerr << c.summary.dump(2) << "\n";
            } else {
                t.write(cert_c.out);
                std::cout << c.summary.dump(2) << "\n";
            }
        } else if (*val_cmd) {
            const Problem p = load(val_c);
            if (p.sweep) throw SchemaError("validate needs a single x0");
            const ValidateOutput v = cmd_validate(p, samples, p.monte_carlo.seed, resolve_threads(val_c.threads));
            std::cout << validate_to_json(v, p).dump(2) << "\n";
            if (!val_c.out.empty()) {
                records_to_csv({v.quadrature, v.monte_carlo}, p.query.system.state_dim()).write(val_c.out, true);
            }
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
