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

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "reachkit/harness.hpp"

using namespace reachkit;
using nlohmann::json;

namespace {

json integrator_doc(double sd, double t) {
    return json::parse(R"({
      "name": "integrator-1d",
      "system": {"A": [[1]], "B": [[1]]},
      "disturbance": {"gaussian": {"mean": [0], "covariance": [[1]]}},
      "input_box": {"lower": -1, "upper": 1},
      "safe": {"lower": -2, "upper": 2},
      "target": {"lower": 0, "upper": 0},
      "horizon": 1,
      "points": [[-1], [-0.5], [0], [0.5], [1]],
      "dp": {"state_spacing": 0.25, "input_spacing": 0.25, "disturbance_spacing": 0.01,
             "disturbance_box": {"lower": -1, "upper": 1}},
      "seed": 5
    })")
        .patch(json::array({
            {{"op", "replace"}, {"path", "/disturbance/gaussian/covariance"}, {"value", {{sd * sd}}}},
            {{"op", "replace"}, {"path", "/target/lower"}, {"value", -t}},
            {{"op", "replace"}, {"path", "/target/upper"}, {"value", t}},
        }));
}

json double_integrator_doc() {
    return json::parse(R"({
      "name": "di",
      "system": {"chain_of_integrators": {"n": 2, "sampling": 0.1}},
      "disturbance": {"gaussian": {"mean": 0, "covariance_scale": 0.01}},
      "input_box": {"lower": -1, "upper": 1},
      "safe": {"lower": -1, "upper": 1},
      "target": {"lower": -0.5, "upper": 0.5},
      "horizon": 3,
      "x0": [0.2, -0.1],
      "solver": {"search_points_per_shift": 100},
      "dp": {"state_spacing": 0.1, "input_spacing": 0.25, "disturbance_spacing": 0.1,
             "disturbance_box": {"lower": -0.3, "upper": 0.3}},
      "seed": 9
    })");
}

double closed_form(double x, double t, double sd) {
    const double mean = x + std::clamp(-x, -1.0, 1.0);
    return oracle::normal_interval(mean, sd, -t, t);
}

std::vector<std::vector<std::string>> without_last_column(const CsvTable& t) {
    auto rows = t.rows;
    for (auto& r : rows) r.pop_back();
    return rows;
}

}  // namespace

TEST_CASE("problem parsing with shorthands") {
    auto doc = double_integrator_doc();
    doc["safe"]["upper"] = json::array({1, nullptr});
    doc["target"]["lower"] = "-inf";
    const Problem p = parse_problem(doc);
    CHECK(p.name == "di");
    CHECK(p.query.system.state_dim() == 2);
    CHECK(p.query.system.A()(0, 1) == doctest::Approx(0.1));
    CHECK(std::isinf(p.query.safe.upper()(1)));
    CHECK(std::isinf(p.query.target.lower()(0)));
    CHECK(p.query.system.disturbance().as_gaussian().covariance == 0.01 * MatrixXd::Identity(2, 2));
    CHECK_FALSE(p.sweep);
    CHECK(p.points.size() == 1);
    CHECK(p.solver.search_points_per_shift == 100);
    CHECK(p.dp_grid().state_spacing == 0.1);

    doc.erase("x0");
    doc["sweep"] = {{"lower", -0.5}, {"upper", {0.5, 0.0}}, {"spacing", 0.25}};
    const Problem s = parse_problem(doc);
    CHECK(s.sweep);
    REQUIRE(s.points.size() == 15);
    CHECK(s.points[0] == Eigen::Vector2d(-0.5, -0.5));
    CHECK(s.points[1] == Eigen::Vector2d(-0.5, -0.25));
    CHECK(s.points[14] == Eigen::Vector2d(0.5, 0.0));

    doc["disturbance"]["gaussian"] = {{"covariance_diagonal", {0.01, 0.04}}};
    CHECK(parse_problem(doc).query.system.disturbance().as_gaussian().covariance(1, 1) == 0.04);
}

TEST_CASE("master seed feeds every component") {
    const Problem a = parse_problem(double_integrator_doc());
    Problem b = parse_problem(double_integrator_doc());
    CHECK(a.solver.seed == b.solver.seed);
    apply_master_seed(b, 10);
    CHECK(a.solver.seed != b.solver.seed);
    CHECK(b.quad.seed != b.solver.seed);
}

TEST_CASE("schema errors") {
    const auto base = double_integrator_doc();
    auto expect_error = [](json d) { CHECK_THROWS_AS(parse_problem(d), SchemaError); };
    auto d = base;
    d.erase("horizon");
    expect_error(d);
    d = base;
    d["x0"] = {0.1, 0.2, 0.3};
    expect_error(d);
    d = base;
    d["safe"]["lower"] = {-1, -1, -1};
    expect_error(d);
    d = base;
    d["system"] = {{"A", {{1, 0}, {0, 1}}}, {"B", {{1}}}};
    expect_error(d);
    d = base;
    d["disturbance"]["gaussian"] = {{"covariance", {{1, 2}, {2, 1}}}};
    expect_error(d);
    d = base;
    d["solver"]["method"] = "bfgs";
    expect_error(d);
    d = base;
    d["solver"]["eps_clamp"] = 2.0;
    expect_error(d);
    d = base;
    d["input_box"] = {{"lower", 1}, {"upper", -1}};
    expect_error(d);
    d = base;
    d["horizon"] = 0;
    expect_error(d);
    d = base;
    d.erase("x0");
    expect_error(d);
    expect_error(json::array());
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), SchemaError);
}

TEST_CASE("CSV quoting and round trip") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvTable t;
    t.header = {"name", "value"};
    t.rows = {{"x,y", "1"}, {"line\nbreak", "\"q\""}, {"", "3"}};
    const CsvTable back = parse_csv(t.to_string());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_seconds(1.23456) == "1.235");
}

TEST_CASE("solve from outside the safe set returns zero immediately") {
    auto doc = double_integrator_doc();
    doc["x0"] = {1.5, 0.0};
    const Problem p = parse_problem(doc);
    for (Method m : {Method::FtbuDs, Method::FtbuSl, Method::Dp}) {
        const auto r = cmd_solve(p, m);
        CHECK(r.probability == 0.0);
        CHECK(r.evals == 0);
    }
}

TEST_CASE("single-step integrator solve matches the closed form") {
    auto doc = integrator_doc(0.5, 0.4);
    doc.erase("points");
    for (double x : {-1.4, -0.2, 0.6, 1.3}) {
        doc["x0"] = {x};
        const auto r = cmd_solve(parse_problem(doc), Method::FtbuDs);
        CHECK(std::abs(r.probability - closed_form(x, 0.4, 0.5)) <= 1e-3);
        const auto j = record_to_json(r, parse_problem(doc));
        CHECK(j["method"] == "ftbu-ds");
        CHECK(j["query"]["x0"][0] == x);
        CHECK(j["version"] == version());
    }
    // Deep in the clamped plateau only the least-squares start finds the target.
    auto far = integrator_doc(0.3, 0.4);
    far.erase("points");
    far["x0"] = {-1.7};
    far["solver"] = {{"heuristic_start", true}};
    CHECK(std::abs(cmd_solve(parse_problem(far), Method::FtbuDs).probability - closed_form(-1.7, 0.4, 0.3)) <= 1e-3);
}

TEST_CASE("grid of one point reproduces solve") {
    const Problem single = parse_problem(double_integrator_doc());
    auto doc = double_integrator_doc();
    doc["points"] = {doc["x0"]};
    doc.erase("x0");
    const Problem sweep = parse_problem(doc);
    const std::vector<Method> methods{Method::FtbuDs, Method::FtbuSl, Method::Dp};
    const auto g = cmd_grid(sweep, methods);
    std::vector<ResultRecord> solo;
    for (Method m : methods) solo.push_back(cmd_solve(single, m));
    CHECK(without_last_column(records_to_csv(g.records, 2)) == without_last_column(records_to_csv(solo, 2)));
}

TEST_CASE("grid output is deterministic and parses back") {
    auto doc = double_integrator_doc();
    doc.erase("x0");
    doc["sweep"] = {{"lower", -0.4}, {"upper", 0.4}, {"spacing", 0.4}};
    const Problem p = parse_problem(doc);
    const auto a = cmd_grid(p, {Method::FtbuDs, Method::Dp}, 1);
    const auto b = cmd_grid(p, {Method::FtbuDs, Method::Dp}, 3);
    const auto ta = records_to_csv(a.records, 2);
    CHECK(without_last_column(ta) == without_last_column(records_to_csv(b.records, 2)));
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(a.summary["relative_error"]["ftbu-ds"]["points_dp_above_eps"].get<int>() > 0);

    const auto back = parse_csv(ta.to_string());
    REQUIRE(back.rows.size() == 18);
    CHECK(back.header.back() == "wall_time_s");
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
        const auto& r = a.records[i];
        CHECK(back.rows[i][1] == method_tag(r.method));
        CHECK(std::stod(back.rows[i][2]) == r.x0(0));
        CHECK(std::stod(back.rows[i][3]) == r.x0(1));
        const double p_back = std::stod(back.rows[i][4]);
        CHECK(p_back == r.probability);
        CHECK(p_back >= 0.0);
        CHECK(p_back <= 1.0);
    }
}

TEST_CASE("validate on trivial sets") {
    auto doc = double_integrator_doc();
    doc["safe"] = {{"lower", nullptr}, {"upper", nullptr}};
    doc["target"] = {{"lower", nullptr}, {"upper", nullptr}};
    const auto whole = cmd_validate(parse_problem(doc), 2000, 3);
    CHECK(whole.quadrature.probability == 1.0);
    CHECK(whole.monte_carlo.probability == 1.0);
    CHECK(whole.agree);

    doc = double_integrator_doc();
    doc["target"] = {{"lower", 1}, {"upper", -1}};
    const auto empty = cmd_validate(parse_problem(doc), 2000, 3);
    CHECK(empty.quadrature.probability == 0.0);
    CHECK(empty.monte_carlo.probability == 0.0);
    CHECK(empty.agree);
    const auto j = validate_to_json(empty, parse_problem(doc));
    CHECK(j["monte_carlo"]["method"] == "mc");
}

TEST_CASE("certificate flags the coarse grid of the 1-D analog") {
    const double sd = 0.15;
    const double t = 0.3;
    const Problem p = parse_problem(integrator_doc(sd, t));
    const auto c = cmd_certificate(p, {0.5, 0.25});
    REQUIRE(c.rows.size() == 10);
    CHECK(c.summary["spacings"][0]["valid"] == false);
    CHECK(c.summary["spacings"][1]["valid"] == true);
    for (const auto& r : c.rows) {
        CHECK(r.ftbu_bound == doctest::Approx(closed_form(r.x0(0), t, sd)).epsilon(1e-9));
    }

    // Replacing DP by the exact value never flags anything.
    const auto exact = cmd_certificate(p, {0.5, 0.25, 0.01}, 1,
                                       [&](double, const VectorXd& x) { return closed_form(x(0), t, sd); });
    for (const auto& r : exact.rows) CHECK(r.valid);

    const auto csv = certificate_to_csv(c, 1);
    CHECK(csv.header.front() == "spacing");
    CHECK(csv.rows.front()[6] == "false");
}

TEST_CASE("bench rows") {
    BenchOptions o;
    o.n_list = {1, 4};
    o.points = 3;
    o.horizon = 3;
    o.dp.state_spacing = 0.5;
    o.dp.input_spacing = 0.5;
    o.dp.disturbance_spacing = 0.25;
    o.methods = {Method::FtbuDs, Method::Dp};
    o.quad.eps = 1e-2;
    const auto rows = cmd_bench(o);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status == "ok");
    CHECK(rows[1].method == Method::Dp);
    CHECK(rows[2].status == "ok");
    CHECK(rows[3].status == "infeasible-dimension");
    o.dp.state_spacing = 0.05;
    o.n_list = {4};
    o.methods = {Method::Dp};
    CHECK(cmd_bench(o).front().status == "infeasible-memory");
    const auto csv = bench_to_csv(rows);
    CHECK(csv.header.back() == "mean_wall_time_s");
    CHECK(without_last_column(csv) == without_last_column(bench_to_csv(cmd_bench([&] {
              auto again = o;
              again.n_list = {1, 4};
              again.methods = {Method::FtbuDs, Method::Dp};
              again.dp.state_spacing = 0.5;
              return again;
          }()))));
}

TEST_CASE("method names") {
    CHECK(parse_method("ds") == Method::FtbuDs);
    CHECK(parse_method("ftbu-sl") == Method::FtbuSl);
    CHECK(method_tag(Method::Mc) == "mc");
    CHECK(parse_method_list("ds,dp").size() == 2);
    CHECK_THROWS(parse_method("x"));
}
