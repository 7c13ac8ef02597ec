// Copyright 2026 The APR Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Accuracy, pass@n / cons@n, token and latency accounting, and the CSV
// curves built from them.

#ifndef APR_METRICS_H_
#define APR_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "apr/countdown.h"
#include "apr/runtime.h"
#include "apr/solvers.h"

namespace apr {

// Operations in execution order, commutative operands larger first.
std::string CanonicalSolution(const Solution& sol);

// outcomes[t] holds the samples for tasks[t]; only the first n are used.
// Throw std::invalid_argument when a task has fewer than n samples or n == 0.
double PassAtN(const std::vector<Task>& tasks,
               const std::vector<std::vector<SolveOutcome>>& outcomes,
               std::size_t n);
double ConsAtN(const std::vector<Task>& tasks,
               const std::vector<std::vector<SolveOutcome>>& outcomes,
               std::size_t n);

// Majority vote over validating samples; ties go to the lexicographically
// smallest canonical string. nullopt when nothing validates.
std::optional<Solution> MajorityVote(const Task& task,
                                     const std::vector<SolveOutcome>& samples);

struct TaskRow {
  bool solved = false;
  std::size_t total_tokens = 0;
  std::size_t sequential_tokens = 0;
  std::size_t child_count = 0;
  std::size_t max_thread_tokens = 0;
  double latency_ms = 0.0;

  bool operator==(const TaskRow&) const = default;
};

TaskRow MakeRow(const SolveOutcome& outcome, const WorkerPool& pool);

struct EvalReport {
  std::string method;
  std::string config;
  WorkerPool pool;
  std::vector<TaskRow> rows;

  double accuracy() const;
  double mean_total_tokens() const;
  double mean_sequential_tokens() const;
  double mean_child_count() const;
};

// Fraction of rows solved with every thread no longer than each cap.
// Throws std::invalid_argument unless caps are ascending.
std::vector<double> CumulativeAccuracy(const std::vector<TaskRow>& rows,
                                       const std::vector<std::size_t>& caps);

enum class CurveAxis : std::uint8_t {
  kTotalTokens,
  kSequentialTokens,
  kLatency,
  kContextCap,
};

std::string_view ToString(CurveAxis axis);

struct CurvePoint {
  double x_value = 0.0;
  double accuracy = 0.0;
  std::size_t n_tasks = 0;
  std::string method;
  std::string config;
};

// One point per (report, x) pair, reports outer. A row counts at x when it
// is solved and its axis value is <= x.
std::vector<CurvePoint> ComputeCurve(const std::vector<EvalReport>& reports,
                                     CurveAxis axis,
                                     const std::vector<double>& grid);

// Multiples of 512 tokens (or their latency at per_token_ms) up to the
// largest observed value; 1k..4k for the context-cap axis.
std::vector<double> DefaultGrid(const std::vector<EvalReport>& reports,
                                CurveAxis axis);

// Writes x_value,accuracy,n_tasks,method,config. The latency curve starts
// with a "# per_token_ms=...,workers=..." comment. Throws
// std::invalid_argument on an empty report set or a report with no rows,
// std::runtime_error on I/O failure.
void WriteCurveCsv(const std::filesystem::path& path,
                   const std::vector<EvalReport>& reports, CurveAxis axis,
                   const std::vector<double>& grid);

// The four curves as <dir>/curve_<axis>.csv, default grids.
void ComputeCurves(const std::filesystem::path& dir,
                   const std::vector<EvalReport>& reports);

// One JSON object per row, tagged with method and config.
void WriteReportJsonl(const std::filesystem::path& path,
                      const std::vector<EvalReport>& reports);

// Fixed-point, six decimals; used for every CSV number.
std::string FormatNumber(double v);

}  // namespace apr

#endif  // APR_METRICS_H_
