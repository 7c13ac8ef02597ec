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

// Spawn/join execution engine.
//
// A Policy decides, one action at a time, what a thread does next. The
// runtime owns everything else: token accounting against the per-thread
// context cap, the join barrier, child numbering, and the rules children
// must follow (no spawning, always end with a join). Policies never see a
// sibling's tokens; a child's view starts at the message it was spawned with.

#ifndef APR_RUNTIME_H_
#define APR_RUNTIME_H_

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "apr/countdown.h"
#include "apr/trace.h"

namespace apr {

struct EmitAction {
  std::string text;  // one line, no markers
};
struct SpawnAction {
  std::vector<std::string> messages;
};
struct JoinAction {
  std::optional<std::string> message;  // nullopt joins with FAIL
};
struct AnswerAction {
  Solution solution;
  // Verbatim answer line from an external model; rendered from `solution`
  // when empty.
  std::string line;
};
struct GiveUpAction {};
// The policy could not produce a valid action (transport failure,
// unparseable completion).
struct FaultAction {
  std::string reason;
};

using Action = std::variant<EmitAction, SpawnAction, JoinAction, AnswerAction,
                            GiveUpAction, FaultAction>;

enum class ThreadRole : std::uint8_t { kRoot, kChild };

struct ThreadView {
  ThreadRole role = ThreadRole::kRoot;
  // Full window so far: prefix, generated lines, joined-in messages.
  std::string_view context;
  std::size_t tokens_used = 0;
  std::size_t token_cap = 0;
  // Messages returned by the children of the spawn that just completed, in
  // child order. Empty on every other call.
  std::span<const std::optional<std::string>> joined;
};

class PolicyThread {
 public:
  virtual ~PolicyThread() = default;
  virtual Action Next(const ThreadView& view) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  // Called concurrently for sibling children; implementations must not share
  // mutable state between the threads they open.
  virtual std::unique_ptr<PolicyThread> Open(ThreadRole role,
                                             std::string_view prefix) const = 0;
};

struct BudgetConfig {
  std::size_t context_cap_tokens = 4096;
  // Children per trace, across all spawns.
  std::size_t max_child_threads = 10;
  std::optional<std::size_t> enforce_child_count;
};

inline constexpr std::size_t kMaxChildThreads = 10;
inline constexpr std::size_t kUnboundedContext =
    std::numeric_limits<std::size_t>::max() / 4;

// Throws std::invalid_argument on out-of-range fields.
void CheckBudget(const BudgetConfig& budget);

struct WorkerPool {
  std::size_t workers = 7;
  double per_token_ms = 2.0;
  double spawn_overhead_ms = 0.0;
};

void CheckPool(const WorkerPool& pool);

struct RuntimeOptions {
  // Children of one spawn executed concurrently; 1 runs them inline.
  std::size_t max_parallel_children = 1;
};

class ThreadRuntime {
 public:
  ThreadRuntime() = default;
  explicit ThreadRuntime(RuntimeOptions options) : options_(options) {}

  // Drives `policy` from the task's start state. The result does not depend
  // on how children were physically scheduled.
  Trace Run(const Policy& policy, const Task& task, const BudgetConfig& budget,
            const WorkerPool& pool = {}) const;

  const RuntimeOptions& options() const { return options_; }

 private:
  RuntimeOptions options_;
};

// Makespan of independent jobs under greedy longest-first assignment to
// `workers` machines.
std::size_t ListScheduleMakespan(std::vector<std::size_t> jobs,
                                 std::size_t workers);

// Parent segments plus, per spawn, the list-scheduled makespan of its
// children, all in generated tokens, times per_token_ms, plus
// spawn_overhead_ms per spawn. Child prefill is free.
double SimulateLatency(const Trace& trace, const WorkerPool& pool);

// Tokens of the FAIL join a child always has room for.
std::size_t FailJoinTokens();

// Replays fixed per-thread action lists. The root plays `root`; a child plays
// the script registered under its exact spawn message, or gives up.
class ScriptedPolicy : public Policy {
 public:
  ScriptedPolicy(std::vector<Action> root,
                 std::map<std::string, std::vector<Action>> children)
      : root_(std::move(root)), children_(std::move(children)) {}

  std::unique_ptr<PolicyThread> Open(ThreadRole role,
                                     std::string_view prefix) const override;

 private:
  std::vector<Action> root_;
  std::map<std::string, std::vector<Action>> children_;
};

}  // namespace apr

#endif  // APR_RUNTIME_H_
