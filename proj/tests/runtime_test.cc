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


#include "apr/runtime.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "apr/codec.h"

namespace apr {
namespace {

// A plain line of exactly n tokens.
std::string Words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += i ? " w" : "w";
  return s;
}

const Task kTask{{1, 4, 6, 8}, 10};
const Solution kSolution{{{8, 6, Operator::kSub, 2},
                          {4, 1, Operator::kAdd, 5},
                          {2, 5, Operator::kMul, 10}}};

// Root generates 100 tokens up to and including its spawn, children generate
// 50 and 80, and the root finishes with 20 more.
ScriptedPolicy HundredFiftyEightyTwenty() {
  const std::string spawn_line = RenderSpawn({"a", "b"});
  const std::size_t spawn_tokens = CountTokens(spawn_line);
  const std::size_t join_tokens = CountTokens(RenderJoin(std::string("ok")));
  const std::size_t answer_tokens = CountTokens(RenderAnswer(kTask, kSolution));
  std::vector<Action> root = {EmitAction{Words(100 - spawn_tokens)},
                              SpawnAction{{"a", "b"}},
                              EmitAction{Words(20 - answer_tokens)},
                              AnswerAction{kSolution, ""}};
  std::map<std::string, std::vector<Action>> children;
  children["a"] = {EmitAction{Words(50 - join_tokens)}, JoinAction{"ok"}};
  children["b"] = {EmitAction{Words(80 - join_tokens)}, JoinAction{"ok"}};
  return ScriptedPolicy(std::move(root), std::move(children));
}

TEST(RuntimeTest, FailJoinTokens) { EXPECT_EQ(FailJoinTokens(), 8u); }

TEST(RuntimeTest, TokenAccountingExample) {
  const Trace trace = ThreadRuntime().Run(HundredFiftyEightyTwenty(), kTask, {});
  ASSERT_EQ(trace.threads.size(), 3u);
  EXPECT_EQ(trace.status(), ThreadEnd::kAnswered);
  EXPECT_EQ(trace.threads[0].generated_tokens, 120u);
  EXPECT_EQ(trace.threads[1].generated_tokens, 50u);
  EXPECT_EQ(trace.threads[2].generated_tokens, 80u);
  EXPECT_EQ(TotalTokens(trace), 250u);
  EXPECT_EQ(SequentialTokens(trace), 200u);
  EXPECT_EQ(trace.answer, kSolution);
  CheckWellFormed(trace);
}

TEST(RuntimeTest, LatencyExample) {
  const Trace trace = ThreadRuntime().Run(HundredFiftyEightyTwenty(), kTask, {});
  for (double t : {0.5, 2.0}) {
    for (double overhead : {0.0, 3.0}) {
      for (std::size_t w : {2, 3, 7}) {
        EXPECT_DOUBLE_EQ(SimulateLatency(trace, {w, t, overhead}), 200 * t + overhead);
      }
      EXPECT_DOUBLE_EQ(SimulateLatency(trace, {1, t, overhead}), 250 * t + overhead);
    }
  }
  EXPECT_THROW(SimulateLatency(trace, {0, 1.0, 0.0}), std::invalid_argument);
}

TEST(RuntimeTest, ChildSeesOnlyItsMessage) {
  class Probe : public PolicyThread {
   public:
    explicit Probe(std::string* seen) : seen_(seen) {}
    Action Next(const ThreadView& v) override {
      *seen_ = std::string(v.context);
      return JoinAction{"done"};
    }
    std::string* seen_;
  };
  class ProbePolicy : public Policy {
   public:
    std::unique_ptr<PolicyThread> Open(ThreadRole role, std::string_view) const override {
      if (role == ThreadRole::kChild) return std::make_unique<Probe>(&seen);
      std::vector<Action> script = {EmitAction{"secret root line"},
                                    SpawnAction{{"message"}}};
      root_ = std::make_unique<ScriptedPolicy>(script, std::map<std::string, std::vector<Action>>{});
      return root_->Open(role, "");
    }
    mutable std::string seen;
    mutable std::unique_ptr<ScriptedPolicy> root_;
  };
  ProbePolicy policy;
  const Trace trace = ThreadRuntime().Run(policy, kTask, {});
  EXPECT_EQ(policy.seen, "message");
  ASSERT_EQ(trace.threads.size(), 2u);
  EXPECT_EQ(trace.threads[1].end, ThreadEnd::kJoined);
  EXPECT_EQ(trace.status(), ThreadEnd::kNoResult);
}

TEST(RuntimeTest, ChildSpawnIsAProtocolError) {
  ScriptedPolicy policy({SpawnAction{{"c"}}}, {{"c", {SpawnAction{{"d"}}}}});
  const Trace trace = ThreadRuntime().Run(policy, kTask, {});
  ASSERT_EQ(trace.threads.size(), 2u);
  EXPECT_EQ(trace.threads[1].end, ThreadEnd::kFailed);
  EXPECT_FALSE(trace.diagnostics.empty());
  CheckWellFormed(trace);
}

TEST(RuntimeTest, RootProtocolErrors) {
  const Trace join = ThreadRuntime().Run(ScriptedPolicy({JoinAction{"x"}}, {}), kTask, {});
  EXPECT_EQ(join.status(), ThreadEnd::kProtocolError);
  const Trace fault = ThreadRuntime().Run(ScriptedPolicy({FaultAction{"bad"}}, {}), kTask, {});
  EXPECT_EQ(fault.status(), ThreadEnd::kProtocolError);
  const Trace marker = ThreadRuntime().Run(ScriptedPolicy({EmitAction{"<JOIN> x </JOIN>"}}, {}), kTask, {});
  EXPECT_EQ(marker.status(), ThreadEnd::kProtocolError);
  BudgetConfig none;
  none.max_child_threads = 0;
  const Trace spawn = ThreadRuntime().Run(ScriptedPolicy({SpawnAction{{"a"}}}, {}), kTask, none);
  EXPECT_EQ(spawn.status(), ThreadEnd::kProtocolError);
}

TEST(RuntimeTest, ChildOverflowJoinsWithFail) {
  BudgetConfig budget;
  budget.context_cap_tokens = 64;
  ScriptedPolicy policy({SpawnAction{{"c"}}, AnswerAction{kSolution, ""}},
                        {{"c", {EmitAction{Words(40)}, EmitAction{Words(40)},
                                JoinAction{"late"}}}});
  const Trace trace = ThreadRuntime().Run(policy, kTask, budget);
  ASSERT_EQ(trace.threads.size(), 2u);
  EXPECT_EQ(trace.threads[1].end, ThreadEnd::kFailed);
  EXPECT_LE(trace.threads[1].length_tokens(), 64u);
  EXPECT_EQ(trace.status(), ThreadEnd::kAnswered);
}

TEST(RuntimeTest, RootOverflowExhaustsBudget) {
  BudgetConfig budget;
  budget.context_cap_tokens = 50;
  const Trace trace =
      ThreadRuntime().Run(ScriptedPolicy({EmitAction{Words(30)}, EmitAction{Words(30)}}, {}),
                          kTask, budget);
  EXPECT_EQ(trace.status(), ThreadEnd::kBudgetExhausted);
  EXPECT_LE(trace.root().length_tokens(), 50u);
}

TEST(RuntimeTest, ChildBudgetTruncatesSpawn) {
  BudgetConfig budget;
  budget.max_child_threads = 2;
  ScriptedPolicy policy({SpawnAction{{"a", "b", "c"}}}, {});
  const Trace trace = ThreadRuntime().Run(policy, kTask, budget);
  EXPECT_EQ(ChildCount(trace), 2u);
  EXPECT_EQ(trace.threads[1].end, ThreadEnd::kFailed);
}

TEST(RuntimeTest, ParallelChildrenMatchInline) {
  std::vector<std::string> messages;
  std::map<std::string, std::vector<Action>> children;
  for (int i = 0; i < 10; ++i) {
    const std::string m = "m" + std::to_string(i);
    messages.push_back(m);
    children[m] = {EmitAction{Words(5 + i)}, JoinAction{i % 3 ? std::optional<std::string>("r" + m) : std::nullopt}};
  }
  ScriptedPolicy policy({SpawnAction{messages}, AnswerAction{kSolution, ""}}, children);
  const Trace inline_run = ThreadRuntime().Run(policy, kTask, {});
  for (std::size_t p : {2, 4, 10}) {
    const Trace par = ThreadRuntime(RuntimeOptions{p}).Run(policy, kTask, {});
    EXPECT_EQ(par.threads, inline_run.threads);
    EXPECT_EQ(Encode(par), Encode(inline_run));
  }
}

TEST(RuntimeTest, RejectsBadBudgets) {
  BudgetConfig b;
  b.max_child_threads = 11;
  EXPECT_THROW(CheckBudget(b), std::invalid_argument);
  b = {};
  b.enforce_child_count = 11;
  EXPECT_THROW(CheckBudget(b), std::invalid_argument);
  b = {};
  b.context_cap_tokens = 0;
  EXPECT_THROW(ThreadRuntime().Run(ScriptedPolicy({}, {}), kTask, b), std::invalid_argument);
  EXPECT_THROW(CheckPool({1, -1.0, 0.0}), std::invalid_argument);
}

TEST(MakespanTest, Examples) {
  EXPECT_EQ(ListScheduleMakespan({5, 5, 5}, 2), 10u);
  EXPECT_EQ(ListScheduleMakespan({5, 5, 5}, 3), 5u);
  EXPECT_EQ(ListScheduleMakespan({}, 3), 0u);
  EXPECT_EQ(ListScheduleMakespan({50, 80}, 1), 130u);
  EXPECT_EQ(ListScheduleMakespan({50, 80}, 2), 80u);
}

// Optimal makespan by trying every assignment.
std::size_t OptimalMakespan(const std::vector<std::size_t>& jobs, std::size_t w) {
  std::size_t best = ~std::size_t{0};
  std::vector<std::size_t> assign(jobs.size(), 0);
  while (true) {
    std::vector<std::size_t> load(w, 0);
    for (std::size_t i = 0; i < jobs.size(); ++i) load[assign[i]] += jobs[i];
    best = std::min(best, *std::max_element(load.begin(), load.end()));
    std::size_t k = 0;
    while (k < assign.size() && ++assign[k] == w) assign[k++] = 0;
    if (k == assign.size()) break;
  }
  return best;
}

TEST(MakespanTest, BoundsAgainstOptimum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::size_t> jobs(1 + rng() % 7);
    for (auto& j : jobs) j = 1 + rng() % 60;
    const std::size_t sum = std::accumulate(jobs.begin(), jobs.end(), std::size_t{0});
    const std::size_t longest = *std::max_element(jobs.begin(), jobs.end());
    std::size_t prev = sum + 1;
    for (std::size_t w = 1; w <= 4; ++w) {
      const std::size_t m = ListScheduleMakespan(jobs, w);
      const std::size_t opt = OptimalMakespan(jobs, w);
      EXPECT_GE(m, opt);
      // Longest-first is within 4/3 of optimal.
      EXPECT_LE(3 * m, 4 * opt);
      EXPECT_GE(m, longest);
      EXPECT_LE(m, sum);
      EXPECT_LE(m, prev);
      prev = m;
    }
    EXPECT_EQ(ListScheduleMakespan(jobs, 1), sum);
    EXPECT_EQ(ListScheduleMakespan(jobs, jobs.size()), longest);
  }
}

}  // namespace
}  // namespace apr
