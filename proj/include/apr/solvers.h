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

// Symbolic search policies: serialized hybrid BFS/DFS (SoS+) and its
// parallel variant (APR) that hands promising states to child threads.

#ifndef APR_SOLVERS_H_
#define APR_SOLVERS_H_

#include <memory>
#include <optional>
#include <string_view>

#include "apr/countdown.h"
#include "apr/runtime.h"
#include "apr/search.h"
#include "apr/trace.h"

namespace apr {

enum class SolveStatus : std::uint8_t {
  kGoalReached,
  kNoResult,
  kBudgetExhausted,
  kProtocolError,  // only reachable with external policies
};

std::string_view ToString(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNoResult;
  std::optional<Solution> solution;  // set iff status == kGoalReached
  std::shared_ptr<const Trace> trace;
};

// Maps a finished trace to an outcome. An answer that does not validate
// against `task` is reported as kNoResult.
SolveOutcome OutcomeFromTrace(const Task& task, Trace trace);

enum class SearchMode : std::uint8_t { kSosPlus, kApr };

struct SymbolicConfig {
  ExpansionConfig expansion;
  // Added to the successor count to get the spawn width, then clamped to
  // [1, successors].
  double spawn_width_bias = 0.0;
};

// Reads each thread's start state from its prefix, so a child knows nothing
// beyond the message it was spawned with.
class SymbolicPolicy : public Policy {
 public:
  SymbolicPolicy(SearchMode mode, SymbolicConfig config, BudgetConfig budget);

  std::unique_ptr<PolicyThread> Open(ThreadRole role,
                                     std::string_view prefix) const override;

 private:
  SearchMode mode_;
  SymbolicConfig config_;
  BudgetConfig budget_;
};

// Single-thread search; child threads are never used.
SolveOutcome SolveSosPlus(const Task& task, const ExpansionConfig& cfg,
                          const BudgetConfig& budget);

SolveOutcome SolveApr(const Task& task, const ExpansionConfig& cfg,
                      const BudgetConfig& budget,
                      const ThreadRuntime& runtime = ThreadRuntime(),
                      const WorkerPool& pool = {}, double spawn_width_bias = 0.0);

}  // namespace apr

#endif  // APR_SOLVERS_H_
