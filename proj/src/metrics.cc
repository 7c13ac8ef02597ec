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


#include "apr/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "apr/codec.h"
#include "json.hpp"

namespace apr {
namespace {

void CheckMatrix(const std::vector<Task>& tasks,
                 const std::vector<std::vector<SolveOutcome>>& outcomes,
                 std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (tasks.size() != outcomes.size()) {
    throw std::invalid_argument("one outcome list per task");
  }
  if (tasks.empty()) throw std::invalid_argument("no tasks");
  for (const auto& row : outcomes) {
    if (row.size() < n) throw std::invalid_argument("fewer than n samples");
  }
}

bool Valid(const Task& task, const SolveOutcome& o) {
  return o.status == SolveStatus::kGoalReached && o.solution &&
         ValidateSolution(task, *o.solution);
}

double AxisValue(const TaskRow& row, CurveAxis axis) {
  switch (axis) {
    case CurveAxis::kTotalTokens: return static_cast<double>(row.total_tokens);
    case CurveAxis::kSequentialTokens:
      return static_cast<double>(row.sequential_tokens);
    case CurveAxis::kLatency: return row.latency_ms;
    case CurveAxis::kContextCap:
      return static_cast<double>(row.max_thread_tokens);
  }
  return 0.0;
}

template <class F>
double Mean(const std::vector<TaskRow>& rows, F f) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const TaskRow& r : rows) sum += f(r);
  return sum / static_cast<double>(rows.size());
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string CanonicalSolution(const Solution& sol) {
  std::vector<ArithOp> ops = sol.ops;
  for (ArithOp& op : ops) {
    if (IsCommutative(op.op) && op.left < op.right) std::swap(op.left, op.right);
  }
  return RenderOps(ops);
}

std::optional<Solution> MajorityVote(const Task& task,
                                     const std::vector<SolveOutcome>& samples) {
  std::map<std::string, std::pair<std::size_t, Solution>> votes;
  for (const SolveOutcome& o : samples) {
    if (!Valid(task, o)) continue;
    auto [it, inserted] =
        votes.try_emplace(CanonicalSolution(*o.solution), 0, *o.solution);
    ++it->second.first;
  }
  const std::pair<const std::string, std::pair<std::size_t, Solution>>* best = nullptr;
  // Ordered map: strict > keeps the lexicographically smallest on ties.
  for (const auto& entry : votes) {
    if (best == nullptr || entry.second.first > best->second.first) best = &entry;
  }
  if (best == nullptr) return std::nullopt;
  return best->second.second;
}

double PassAtN(const std::vector<Task>& tasks,
               const std::vector<std::vector<SolveOutcome>>& outcomes,
               std::size_t n) {
  CheckMatrix(tasks, outcomes, n);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    hits += std::any_of(outcomes[t].begin(), outcomes[t].begin() + n,
                        [&](const SolveOutcome& o) { return Valid(tasks[t], o); });
  }
  return static_cast<double>(hits) / static_cast<double>(tasks.size());
}

double ConsAtN(const std::vector<Task>& tasks,
               const std::vector<std::vector<SolveOutcome>>& outcomes,
               std::size_t n) {
  CheckMatrix(tasks, outcomes, n);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::vector<SolveOutcome> head(outcomes[t].begin(), outcomes[t].begin() + n);
    auto winner = MajorityVote(tasks[t], head);
    hits += winner && ValidateSolution(tasks[t], *winner);
  }
  return static_cast<double>(hits) / static_cast<double>(tasks.size());
}

TaskRow MakeRow(const SolveOutcome& outcome, const WorkerPool& pool) {
  TaskRow row;
  row.solved = outcome.status == SolveStatus::kGoalReached;
  if (outcome.trace) {
    const Trace& t = *outcome.trace;
    row.total_tokens = TotalTokens(t);
    row.sequential_tokens = SequentialTokens(t);
    row.child_count = ChildCount(t);
    row.max_thread_tokens = MaxThreadTokens(t);
    row.latency_ms = SimulateLatency(t, pool);
  }
  return row;
}

double EvalReport::accuracy() const {
  return Mean(rows, [](const TaskRow& r) { return r.solved ? 1.0 : 0.0; });
}
double EvalReport::mean_total_tokens() const {
  return Mean(rows, [](const TaskRow& r) { return double(r.total_tokens); });
}
double EvalReport::mean_sequential_tokens() const {
  return Mean(rows, [](const TaskRow& r) { return double(r.sequential_tokens); });
}
double EvalReport::mean_child_count() const {
  return Mean(rows, [](const TaskRow& r) { return double(r.child_count); });
}

std::vector<double> CumulativeAccuracy(const std::vector<TaskRow>& rows,
                                       const std::vector<std::size_t>& caps) {
  if (!std::is_sorted(caps.begin(), caps.end())) {
    throw std::invalid_argument("caps must be ascending");
  }
  if (rows.empty()) throw std::invalid_argument("no rows");
  std::vector<double> acc;
  for (std::size_t cap : caps) {
    std::size_t hits = 0;
    for (const TaskRow& r : rows) hits += r.solved && r.max_thread_tokens <= cap;
    acc.push_back(static_cast<double>(hits) / static_cast<double>(rows.size()));
  }
  return acc;
}

std::string_view ToString(CurveAxis axis) {
  switch (axis) {
    case CurveAxis::kTotalTokens: return "total_tokens";
    case CurveAxis::kSequentialTokens: return "sequential_tokens";
    case CurveAxis::kLatency: return "latency";
    case CurveAxis::kContextCap: return "context_cap";
  }
  return "unknown";
}

std::vector<CurvePoint> ComputeCurve(const std::vector<EvalReport>& reports,
                                     CurveAxis axis,
                                     const std::vector<double>& grid) {
  if (reports.empty()) throw std::invalid_argument("no reports");
  if (grid.empty()) throw std::invalid_argument("empty grid");
  std::vector<CurvePoint> points;
  for (const EvalReport& rep : reports) {
    if (rep.rows.empty()) throw std::invalid_argument("report without tasks");
    for (double x : grid) {
      std::size_t hits = 0;
      for (const TaskRow& r : rep.rows) hits += r.solved && AxisValue(r, axis) <= x;
      points.push_back({x,
                        static_cast<double>(hits) / static_cast<double>(rep.rows.size()),
                        rep.rows.size(), rep.method, rep.config});
    }
  }
  return points;
}

std::vector<double> DefaultGrid(const std::vector<EvalReport>& reports,
                                CurveAxis axis) {
  if (axis == CurveAxis::kContextCap) return {1024, 2048, 3072, 4096};
  double unit = 512.0;
  if (axis == CurveAxis::kLatency) {
    unit *= reports.empty() ? 1.0 : reports.front().pool.per_token_ms;
    if (unit <= 0.0) unit = 1.0;
  }
  double top = 0.0;
  for (const EvalReport& rep : reports) {
    for (const TaskRow& r : rep.rows) top = std::max(top, AxisValue(r, axis));
  }
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(top / unit)));
  std::vector<double> grid;
  for (std::size_t i = 1; i <= steps; ++i) grid.push_back(unit * double(i));
  return grid;
}

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void WriteCurveCsv(const std::filesystem::path& path,
                   const std::vector<EvalReport>& reports, CurveAxis axis,
                   const std::vector<double>& grid) {
  const std::vector<CurvePoint> points = ComputeCurve(reports, axis, grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (axis == CurveAxis::kLatency) {
    const WorkerPool& pool = reports.front().pool;
    out << "# per_token_ms=" << FormatNumber(pool.per_token_ms)
        << ",workers=" << pool.workers
        << ",spawn_overhead_ms=" << FormatNumber(pool.spawn_overhead_ms) << '\n';
  }
  out << "x_value,accuracy,n_tasks,method,config\n";
  for (const CurvePoint& p : points) {
    out << FormatNumber(p.x_value) << ',' << FormatNumber(p.accuracy) << ','
        << p.n_tasks << ',' << CsvField(p.method) << ',' << CsvField(p.config)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void ComputeCurves(const std::filesystem::path& dir,
                   const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports");
  for (CurveAxis axis : {CurveAxis::kTotalTokens, CurveAxis::kSequentialTokens,
                         CurveAxis::kLatency, CurveAxis::kContextCap}) {
    WriteCurveCsv(dir / ("curve_" + std::string(ToString(axis)) + ".csv"),
                  reports, axis, DefaultGrid(reports, axis));
  }
}

void WriteReportJsonl(const std::filesystem::path& path,
                      const std::vector<EvalReport>& reports) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const EvalReport& rep : reports) {
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const TaskRow& r = rep.rows[i];
      nlohmann::json j = {
          {"method", rep.method},
          {"config", rep.config},
          {"task_index", i},
          {"solved", r.solved},
          {"total_tokens", r.total_tokens},
          {"sequential_tokens", r.sequential_tokens},
          {"child_count", r.child_count},
          {"max_thread_tokens", r.max_thread_tokens},
          {"latency_ms", r.latency_ms},
      };
      out << j.dump() << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace apr
