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
"""Countdown search with serialized and parallel threads."""

from apr_lab._apr_lab import (
    InvalidArgument,
    count_tokens,
    group_advantages,
    h_multiply,
    length_bin,
    list_schedule_makespan,
    oracle_solvable,
    sample_tasks,
    solve_apr,
    solve_sos_plus,
    validate_answer,
)

__all__ = [
    "InvalidArgument",
    "count_tokens",
    "group_advantages",
    "h_multiply",
    "length_bin",
    "list_schedule_makespan",
    "oracle_solvable",
    "sample_tasks",
    "solve_apr",
    "solve_sos_plus",
    "validate_answer",
]
