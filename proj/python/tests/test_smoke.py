# Copyright 2026 The reachkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os

import numpy as np
import pytest

import reachkit as rk


def scalar_query(x0=0.0, target=(-0.5, 0.5), horizon=1, var=0.04):
    sys = rk.LtiSystem(
        np.eye(1), np.eye(1),
        rk.DisturbanceModel.gaussian(np.zeros(1), var * np.eye(1)),
        rk.Box.cube(1, -1.0, 1.0),
    )
    return rk.ReachAvoidQuery(sys, rk.Box.cube(1, -2, 2), rk.Box([target[0]], [target[1]]), horizon, [x0])


def test_version():
    assert rk.__version__.count(".") == 2


def test_orthant_probability():
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    r = rk.mvn_box_probability(np.zeros(2), cov, rk.Box([0, 0], [math.inf, math.inf]))
    assert abs(r.p - 1.0 / 3.0) < 2e-3


def test_concatenated_shapes():
    A, B = rk.chain_of_integrators(2, 0.1)
    Ab, Hb, Gb = rk.concatenated_dynamics(A, B, 3)
    assert Ab.shape == (6, 2) and Hb.shape == (6, 3) and Gb.shape == (6, 6)


def test_quadrature_and_mc_agree():
    q = scalar_query(x0=0.3, horizon=2)
    U = np.array([-0.2, 0.0])
    quad = rk.reach_avoid_probability(q, U)
    mc = rk.reach_avoid_probability_mc(q, U, 50000, 4)
    assert abs(quad.p - mc.p_hat) <= mc.half_width_95 + quad.err_est + 1e-3


def test_infeasible_input_raises():
    with pytest.raises(rk.InfeasibleInput):
        rk.reach_avoid_probability(scalar_query(), np.array([3.0]))


def test_solve_single_step():
    q = scalar_query(x0=0.6)
    res = rk.solve(q)
    # u* = -0.6 centers the successor in the target.
    expect = math.erf(0.5 / (0.2 * math.sqrt(2)))
    assert abs(res.p_star - expect) < 1e-3
    assert res.U_star.shape == (1,)
    assert res.trace[-1][1] <= 1.0


def test_dp_and_value_lookup():
    q = scalar_query(x0=0.0)
    g = rk.GridSpec()
    g.state_spacing = 0.05
    g.input_spacing = 0.05
    g.disturbance_box = rk.Box.cube(1, -0.6, 0.6)
    g.disturbance_spacing = 0.02
    v = rk.dp_solve(q, g)
    assert len(v.values) == 2
    assert v.values[1].shape == (81,)
    assert 0.9 < v.value_at(np.zeros(1)) <= 1.0


def test_problem_file_round_trip():
    path = os.path.join(os.environ.get("REACHKIT_PROBLEMS", "problems"), "chain40.json")
    if not os.path.exists(path):
        pytest.skip("problem presets not found")
    rec = rk.solve_problem(path, "ds")
    assert rec["method"] == "ftbu-ds"
    assert rec["probability"] >= 0.99
    assert len(rec["query"]["x0"]) == 40


def test_schema_error():
    with pytest.raises(rk.SchemaError):
        rk.solve_problem({"system": {}})
