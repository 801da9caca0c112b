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

"""Stochastic reach-avoid lower bounds for LTI systems (Python bindings)."""

import json
import os

from ._reachkit import *  # noqa: F401,F403
from ._reachkit import __version__, solve_problem_json


def solve_problem(problem, method="ds", threads=1):
    """Solve a problem given as a dict, JSON text, or path to a JSON file.

    Returns the result record as a dict (same layout as ``reachkit solve``).
    """
    if isinstance(problem, dict):
        text = json.dumps(problem)
    elif isinstance(problem, (str, os.PathLike)) and os.path.exists(problem):
        with open(problem, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(problem)
    return json.loads(solve_problem_json(text, method, threads))
