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


// Python bindings for the core operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "apr/codec.h"
#include "apr/corpus.h"
#include "apr/countdown.h"
#include "apr/experiment.h"
#include "apr/metrics.h"
#include "apr/runtime.h"
#include "apr/search.h"
#include "apr/solvers.h"
#include "apr/tuner.h"

namespace py = pybind11;

namespace {

apr::Task MakeTask(std::vector<apr::Value> inputs, apr::Value target) {
  apr::Task t{std::move(inputs), target};
  apr::CheckTask(t);
  return t;
}

py::dict OutcomeDict(const apr::Task& task, const apr::SolveOutcome& o,
                     const apr::WorkerPool& pool) {
  const apr::Trace& t = *o.trace;
  py::dict d;
  d["status"] = std::string(apr::ToString(o.status));
  d["answer"] = o.solution ? py::object(py::str(apr::RenderAnswer(task, *o.solution)))
                           : py::object(py::none());
  d["total_tokens"] = apr::TotalTokens(t);
  d["sequential_tokens"] = apr::SequentialTokens(t);
  d["child_count"] = apr::ChildCount(t);
  d["spawn_count"] = apr::SpawnCount(t);
  d["max_thread_tokens"] = apr::MaxThreadTokens(t);
  d["latency_ms"] = apr::SimulateLatency(t, pool);
  py::list threads;
  for (const apr::ThreadText& tt : apr::Encode(t).threads) {
    py::dict th;
    th["id"] = apr::ToIndex(tt.id);
    th["parent"] = tt.parent ? py::object(py::int_(apr::ToIndex(*tt.parent)))
                             : py::object(py::none());
    th["context"] = tt.context;
    th["generated"] = tt.generated;
    threads.append(th);
  }
  d["threads"] = threads;
  return d;
}

apr::BudgetConfig Budget(std::size_t cap, std::size_t max_children,
                         std::optional<std::size_t> children) {
  apr::BudgetConfig b;
  b.context_cap_tokens = cap;
  b.max_child_threads = max_children;
  b.enforce_child_count = children;
  return b;
}

apr::ExpansionConfig Expansion(std::size_t beam_k, double p, std::uint64_t seed) {
  apr::ExpansionConfig c;
  c.beam_k = beam_k;
  c.promising_p = p;
  c.rng_seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_apr_lab, m) {
  m.doc() = "Countdown search with serialized and parallel threads";

  py::register_exception<std::invalid_argument>(m, "InvalidArgument",
                                                PyExc_ValueError);

  m.def(
      "sample_tasks",
      [](std::size_t n, std::size_t inputs, std::uint64_t seed, apr::Value max_target) {
        apr::SampleOptions so;
        so.n = n;
        so.num_inputs = inputs;
        so.seed = seed;
        so.max_target = max_target;
        std::vector<std::pair<std::vector<apr::Value>, apr::Value>> out;
        for (const apr::Task& t : apr::SampleTasks(so)) out.emplace_back(t.inputs, t.target);
        return out;
      },
      py::arg("n"), py::arg("inputs") = 4, py::arg("seed") = 0,
      py::arg("max_target") = 100, "Solvable (inputs, target) pairs.");

  m.def(
      "oracle_solvable",
      [](std::vector<apr::Value> inputs, apr::Value target) {
        return apr::OracleSolvable(MakeTask(std::move(inputs), target)).solvable;
      },
      py::arg("inputs"), py::arg("target"));

  m.def(
      "validate_answer",
      [](std::vector<apr::Value> inputs, apr::Value target, const std::string& line) {
        auto parsed = apr::ParseAnswer(line);
        return parsed && parsed->target == target &&
               apr::ValidateSolution(MakeTask(std::move(inputs), target), parsed->solution);
      },
      py::arg("inputs"), py::arg("target"), py::arg("answer_line"),
      "True if an 'Answer: expr = T' line solves the task.");

  m.def("count_tokens", [](const std::string& s) { return apr::CountTokens(s); },
        py::arg("text"));

  m.def(
      "h_multiply",
      [](std::vector<apr::Value> remaining, apr::Value target) {
        apr::SearchState s;
        std::sort(remaining.begin(), remaining.end());
        s.remaining = std::move(remaining);
        s.target = target;
        return apr::HMultiply(s).value;
      },
      py::arg("remaining"), py::arg("target"));

  m.def(
      "solve_sos_plus",
      [](std::vector<apr::Value> inputs, apr::Value target, std::size_t beam_k,
         double promising_p, std::size_t cap, std::uint64_t seed) {
        const apr::Task task = MakeTask(std::move(inputs), target);
        apr::BudgetConfig b = Budget(cap, 0, std::nullopt);
        apr::SolveOutcome out;
        {
          py::gil_scoped_release release;
          out = apr::SolveSosPlus(task, Expansion(beam_k, promising_p, seed), b);
        }
        return OutcomeDict(task, out, {});
      },
      py::arg("inputs"), py::arg("target"), py::arg("beam_k") = 5,
      py::arg("promising_p") = 0.1, py::arg("cap") = 4096, py::arg("seed") = 0);

  m.def(
      "solve_apr",
      [](std::vector<apr::Value> inputs, apr::Value target, std::size_t beam_k,
         double promising_p, std::size_t cap, std::size_t max_children,
         std::optional<std::size_t> children, double width_bias, std::uint64_t seed,
         std::size_t workers, double per_token_ms) {
        const apr::Task task = MakeTask(std::move(inputs), target);
        apr::WorkerPool pool;
        pool.workers = workers;
        pool.per_token_ms = per_token_ms;
        apr::BudgetConfig b = Budget(cap, max_children, children);
        apr::SolveOutcome out;
        {
          py::gil_scoped_release release;
          out = apr::SolveApr(task, Expansion(beam_k, promising_p, seed), b,
                              apr::ThreadRuntime(), pool, width_bias);
        }
        return OutcomeDict(task, out, pool);
      },
      py::arg("inputs"), py::arg("target"), py::arg("beam_k") = 5,
      py::arg("promising_p") = 0.1, py::arg("cap") = 4096,
      py::arg("max_children") = 10, py::arg("children") = py::none(),
      py::arg("width_bias") = 0.0, py::arg("seed") = 0, py::arg("workers") = 7,
      py::arg("per_token_ms") = 2.0);

  m.def("group_advantages",
        [](const std::vector<double>& r) { return apr::GroupAdvantages(r); },
        py::arg("rewards"));

  m.def(
      "length_bin",
      [](std::size_t total_tokens) { return apr::LengthBinTag(total_tokens).value; },
      py::arg("total_tokens"));

  m.def(
      "list_schedule_makespan",
      [](std::vector<std::size_t> jobs, std::size_t workers) {
        return apr::ListScheduleMakespan(std::move(jobs), workers);
      },
      py::arg("jobs"), py::arg("workers"));
}
