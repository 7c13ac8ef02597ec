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

#include "apr/solvers.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>

#include "apr/codec.h"

namespace apr {
namespace {

// Tokens of a successful child join carrying `ops` operations. Token counts
// do not depend on the numbers, so a dummy path is exact.
std::size_t SuccessJoinTokens(std::size_t ops) {
  std::vector<ArithOp> path(ops, ArithOp{1, 1, Operator::kAdd, 2});
  return CountTokens(RenderJoin(RenderSolutionMessage(path)));
}

// "Answer:" + n leaves + (n - 1) operators + parentheses + "= T".
std::size_t AnswerTokens(std::size_t inputs) {
  const std::size_t n = std::max<std::size_t>(1, inputs);
  const std::size_t parens = n >= 2 ? 2 * (n - 2) : 0;
  return 2 + n + (n - 1) + parens + 2;
}

class FaultThread : public PolicyThread {
 public:
  explicit FaultThread(std::string reason) : reason_(std::move(reason)) {}
  Action Next(const ThreadView&) override { return FaultAction{reason_}; }

 private:
  std::string reason_;
};

class SearchThread : public PolicyThread {
 public:
  SearchThread(SearchMode mode, ThreadRole role, SearchState start,
               const SymbolicConfig& config, const BudgetConfig& budget)
      : mode_(mode),
        role_(role),
        start_(std::move(start)),
        config_(config),
        budget_(budget) {}

  Action Next(const ThreadView& view) override {
    if (!view.joined.empty()) TakeJoins(view.joined);
    while (outbox_.empty()) {
      if (finished_) return GiveUpAction{};
      Step(view);
    }
    Action next = std::move(outbox_.front());
    outbox_.pop_front();
    return next;
  }

 private:
  using Frame = std::deque<SearchState>;

  void Emit(std::string line) {
    queued_tokens_ += CountTokens(line);
    outbox_.push_back(EmitAction{std::move(line)});
  }

  void Step(const ThreadView& view) {
    queued_tokens_ = 0;
    if (!started_) {
      started_ = true;
      if (start_.IsGoal()) {
        Finish(start_);
        return;
      }
      frames_.push_back(Expanded(start_));
      return;
    }
    while (!frames_.empty() && frames_.back().empty()) frames_.pop_back();
    if (frames_.empty()) {
      outbox_.push_back(GiveUpAction{});
      finished_ = true;
      return;
    }
    SearchState current = std::move(frames_.back().front());
    frames_.back().pop_front();
    Emit(RenderState(current));
    if (current.IsGoal()) {
      Finish(current);
      return;
    }
    Frame successors = Expanded(current);
    if (mode_ == SearchMode::kSosPlus) {
      if (!successors.empty() && IsPromising(current, config_.expansion)) {
        // Depth-first: the successors become a nested search that must be
        // exhausted before the enclosing deque resumes.
        frames_.push_back(std::move(successors));
        return;
      }
    } else if (role_ == ThreadRole::kRoot && TrySpawn(current, successors, view)) {
      return;
    }
    Extend(std::move(successors));
  }

  Frame Expanded(const SearchState& state) {
    std::vector<SearchState> next = Expand(state, config_.expansion);
    Frame frame;
    for (SearchState& s : next) {
      Emit(RenderExplore(s.path.back()));
      frame.push_back(std::move(s));
    }
    return frame;
  }

  void Extend(Frame successors) {
    Frame& top = frames_.back();
    for (SearchState& s : successors) top.push_back(std::move(s));
  }

  std::size_t ChildLimit() const {
    std::size_t limit = budget_.max_child_threads;
    if (budget_.enforce_child_count) {
      limit = std::min(limit, *budget_.enforce_child_count);
    }
    return limit;
  }

  bool TrySpawn(const SearchState& current, Frame& successors,
                const ThreadView& view) {
    if (successors.empty()) return false;
    const std::size_t limit = ChildLimit();
    if (spawned_ >= limit) return false;
    const std::size_t room = limit - spawned_;
    const std::size_t n = successors.size();
    std::size_t width = 0;
    if (budget_.enforce_child_count) {
      width = std::min(n, room);
    } else {
      if (!IsPromising(current, config_.expansion)) return false;
      const double biased =
          static_cast<double>(n) + std::round(config_.spawn_width_bias);
      width = static_cast<std::size_t>(
          std::clamp(biased, 1.0, static_cast<double>(n)));
      width = std::min(width, room);
    }
    std::vector<std::string> messages;
    for (std::size_t i = 0; i < width; ++i) {
      messages.push_back(RenderState(successors[i]));
    }
    const std::size_t inputs = start_.remaining.size();
    const std::size_t path_len = inputs > 0 ? inputs - 1 : 0;
    const std::size_t need = view.tokens_used + queued_tokens_ +
                             CountTokens(RenderSpawn(messages)) +
                             width * SuccessJoinTokens(path_len) +
                             AnswerTokens(inputs);
    if (need > view.token_cap) return false;
    spawned_ += width;
    outbox_.push_back(SpawnAction{std::move(messages)});
    successors.erase(successors.begin(),
                     successors.begin() + static_cast<std::ptrdiff_t>(width));
    Extend(std::move(successors));
    return true;
  }

  void TakeJoins(std::span<const std::optional<std::string>> joined) {
    const Task task{start_.remaining, start_.target};
    for (const auto& msg : joined) {
      if (!msg) continue;
      auto ops = ParseSolutionMessage(*msg);
      if (!ops) continue;
      Solution sol{*ops};
      if (!ValidateSolution(task, sol)) continue;
      outbox_.clear();
      if (role_ == ThreadRole::kRoot) {
        outbox_.push_back(AnswerAction{std::move(sol), {}});
      } else {
        outbox_.push_back(JoinAction{RenderSolutionMessage(sol.ops)});
      }
      finished_ = true;
      return;
    }
  }

  void Finish(const SearchState& goal) {
    if (role_ == ThreadRole::kRoot) {
      outbox_.push_back(AnswerAction{Solution{goal.path}, {}});
    } else {
      outbox_.push_back(JoinAction{RenderSolutionMessage(goal.path)});
    }
    finished_ = true;
  }

  SearchMode mode_;
  ThreadRole role_;
  SearchState start_;
  const SymbolicConfig& config_;
  const BudgetConfig& budget_;
  std::vector<Frame> frames_;
  std::deque<Action> outbox_;
  std::size_t queued_tokens_ = 0;
  std::size_t spawned_ = 0;
  bool started_ = false;
  bool finished_ = false;
};

}  // namespace

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kGoalReached: return "goal_reached";
    case SolveStatus::kNoResult: return "no_result";
    case SolveStatus::kBudgetExhausted: return "budget_exhausted";
    case SolveStatus::kProtocolError: return "protocol_error";
  }
  return "unknown";
}

SolveOutcome OutcomeFromTrace(const Task& task, Trace trace) {
  SolveOutcome out;
  switch (trace.status()) {
    case ThreadEnd::kAnswered:
      if (trace.answer && ValidateSolution(task, *trace.answer)) {
        out.status = SolveStatus::kGoalReached;
        out.solution = trace.answer;
      }
      break;
    case ThreadEnd::kBudgetExhausted:
      out.status = SolveStatus::kBudgetExhausted;
      break;
    case ThreadEnd::kProtocolError:
      out.status = SolveStatus::kProtocolError;
      break;
    default:
      break;
  }
  out.trace = std::make_shared<const Trace>(std::move(trace));
  return out;
}

SymbolicPolicy::SymbolicPolicy(SearchMode mode, SymbolicConfig config,
                               BudgetConfig budget)
    : mode_(mode), config_(config), budget_(budget) {
  CheckExpansionConfig(config_.expansion);
  CheckBudget(budget_);
}

std::unique_ptr<PolicyThread> SymbolicPolicy::Open(ThreadRole role,
                                                   std::string_view prefix) const {
  std::optional<SearchState> start = ParseState(prefix);
  if (!start) return std::make_unique<FaultThread>("unparseable start state");
  return std::make_unique<SearchThread>(mode_, role, std::move(*start), config_,
                                        budget_);
}

SolveOutcome SolveSosPlus(const Task& task, const ExpansionConfig& cfg,
                          const BudgetConfig& budget) {
  BudgetConfig single = budget;
  single.max_child_threads = 0;
  single.enforce_child_count.reset();
  SymbolicPolicy policy(SearchMode::kSosPlus, {cfg, 0.0}, single);
  return OutcomeFromTrace(task, ThreadRuntime().Run(policy, task, single));
}

SolveOutcome SolveApr(const Task& task, const ExpansionConfig& cfg,
                      const BudgetConfig& budget, const ThreadRuntime& runtime,
                      const WorkerPool& pool, double spawn_width_bias) {
  SymbolicPolicy policy(SearchMode::kApr, {cfg, spawn_width_bias}, budget);
  return OutcomeFromTrace(task, runtime.Run(policy, task, budget, pool));
}

}  // namespace apr
