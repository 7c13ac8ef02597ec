# Copyright 2026 The APR Lab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import itertools

import pytest

import apr_lab


def test_count_tokens():
    assert apr_lab.count_tokens("") == 0
    assert apr_lab.count_tokens("2+3=5") == 5


def test_sampled_tasks_are_solvable_and_deterministic():
    a = apr_lab.sample_tasks(20, inputs=4, seed=3)
    assert a == apr_lab.sample_tasks(20, inputs=4, seed=3)
    for inputs, target in a:
        assert len(inputs) == 4
        assert apr_lab.oracle_solvable(inputs, target)


def test_unsolvable_by_brute_force():
    assert not apr_lab.oracle_solvable([1, 1, 1, 1], 9)


def test_solvers_return_valid_answers():
    out = apr_lab.solve_sos_plus([1, 4, 6, 8], 10, cap=100000)
    assert out["status"] == "goal_reached"
    assert apr_lab.validate_answer([1, 4, 6, 8], 10, out["answer"])
    par = apr_lab.solve_apr([22, 26, 31, 53], 27, beam_k=15, children=10)
    assert par["status"] == "goal_reached"
    assert par["child_count"] <= 10
    assert par["sequential_tokens"] < par["total_tokens"]
    assert len(par["threads"]) == par["child_count"] + 1


def test_degenerate_apr_matches_sos_plus():
    for inputs, target in apr_lab.sample_tasks(10, seed=5):
        a = apr_lab.solve_sos_plus(inputs, target, promising_p=0.0)
        b = apr_lab.solve_apr(inputs, target, promising_p=0.0)
        assert a["threads"] == b["threads"]


def test_group_advantages():
    adv = apr_lab.group_advantages([1, 0, 0, 1, 1])
    expected = [0.816497, -1.224745, -1.224745, 0.816497, 0.816497]
    assert adv == pytest.approx(expected, abs=1e-6)
    assert apr_lab.group_advantages([1, 1, 1]) == [0.0, 0.0, 0.0]


def test_brute_force_h_multiply():
    remaining, target = [2, 3, 7], 12
    factors = [f for f in range(1, target + 1) if target % f == 0]
    assert apr_lab.h_multiply(remaining, target) == min(
        abs(f - sum(remaining)) for f in factors)


def test_makespan_and_bins():
    assert apr_lab.list_schedule_makespan([5, 5, 5], 2) == 10
    jobs = [7, 3, 3, 2]
    best = min(
        max(sum(j for j, w in zip(jobs, assign) if w == k) for k in range(2))
        for assign in itertools.product(range(2), repeat=len(jobs)))
    assert apr_lab.list_schedule_makespan(jobs, 2) >= best
    assert apr_lab.length_bin(700) == 1024


def test_bad_input_raises():
    with pytest.raises(ValueError):
        apr_lab.solve_sos_plus([0, 1], 1)
