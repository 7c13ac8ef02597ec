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


#include "apr/countdown.h"

#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <map>
#include <random>
#include <set>

namespace apr {
namespace {

// Every value an expression tree over exactly the masked inputs can take,
// built by splitting the mask into two nonempty halves.
class PartitionOracle {
 public:
  explicit PartitionOracle(std::vector<Value> inputs) : inputs_(std::move(inputs)) {}

  bool Reaches(Value target) {
    return Values((1u << inputs_.size()) - 1).contains(target);
  }

 private:
  const std::set<Value>& Values(unsigned mask) {
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    std::set<Value> out;
    if (std::popcount(mask) == 1) {
      out.insert(inputs_[std::countr_zero(mask)]);
    } else {
      for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) {
        const std::set<Value> a = Values(sub);
        const std::set<Value> b = Values(mask ^ sub);
        for (Value x : a) {
          for (Value y : b) {
            if (x + y >= 1) out.insert(x + y);
            if (x - y >= 1) out.insert(x - y);
            out.insert(x * y);
            if (y != 0 && x % y == 0 && x / y >= 1) out.insert(x / y);
          }
        }
      }
    }
    return memo_[mask] = std::move(out);
  }

  std::vector<Value> inputs_;
  std::map<unsigned, std::set<Value>> memo_;
};

Solution Ops(std::vector<ArithOp> ops) { return Solution{std::move(ops)}; }

TEST(ApplyTest, ClosureRules) {
  EXPECT_EQ(Apply(Operator::kAdd, 2, 3), 5);
  EXPECT_EQ(Apply(Operator::kSub, 5, 3), 2);
  EXPECT_FALSE(Apply(Operator::kSub, 3, 3).has_value());
  EXPECT_FALSE(Apply(Operator::kSub, 3, 5).has_value());
  EXPECT_EQ(Apply(Operator::kDiv, 8, 4), 2);
  EXPECT_FALSE(Apply(Operator::kDiv, 7, 2).has_value());
  EXPECT_FALSE(Apply(Operator::kDiv, 7, 0).has_value());
  EXPECT_FALSE(Apply(Operator::kMul, Value{1} << 62, 4).has_value());
}

TEST(ValidateSolutionTest, WorkedInstance) {
  const Task task{{1, 4, 6, 8}, 10};
  EXPECT_TRUE(ValidateSolution(
      task, Ops({{8, 6, Operator::kSub, 2}, {4, 1, Operator::kAdd, 5},
                 {2, 5, Operator::kMul, 10}})));
}

TEST(ValidateSolutionTest, EmptyPathOnSingleton) {
  EXPECT_TRUE(ValidateSolution(Task{{10}, 10}, Ops({})));
  EXPECT_FALSE(ValidateSolution(Task{{10}, 11}, Ops({})));
}

TEST(ValidateSolutionTest, RejectsUnusedInput) {
  EXPECT_FALSE(ValidateSolution(
      Task{{1, 4, 6, 8}, 10},
      Ops({{8, 6, Operator::kAdd, 14}, {14, 4, Operator::kSub, 10}})));
}

TEST(ValidateSolutionTest, RejectsWrongResultAndMissingOperand) {
  const Task task{{2, 3}, 5};
  EXPECT_FALSE(ValidateSolution(task, Ops({{2, 3, Operator::kAdd, 6}})));
  EXPECT_FALSE(ValidateSolution(task, Ops({{2, 2, Operator::kAdd, 4}})));
  EXPECT_FALSE(ValidateSolution(task, Ops({{2, 3, Operator::kSub, 1}})));
  EXPECT_FALSE(ValidateSolution(Task{{}, 5}, Ops({})));
}

TEST(ValidateSolutionTest, IndependentOpsCommute) {
  const Task task{{1, 4, 6, 8}, 10};
  EXPECT_TRUE(ValidateSolution(
      task, Ops({{4, 1, Operator::kAdd, 5}, {8, 6, Operator::kSub, 2},
                 {5, 2, Operator::kMul, 10}})));
}

TEST(OracleTest, Examples) {
  auto r = OracleSolvable(Task{{1, 4, 6, 8}, 10});
  ASSERT_TRUE(r.solvable);
  EXPECT_TRUE(ValidateSolution(Task{{1, 4, 6, 8}, 10}, *r.witness));
  auto single = OracleSolvable(Task{{7}, 7});
  ASSERT_TRUE(single.solvable);
  EXPECT_TRUE(single.witness->ops.empty());
  EXPECT_FALSE(OracleSolvable(Task{{1, 1, 1, 1}, 9}).solvable);
  EXPECT_FALSE(PartitionOracle({1, 1, 1, 1}).Reaches(9));
}

TEST(OracleTest, RejectsTooManyInputs) {
  EXPECT_THROW(OracleSolvable(Task{{1, 1, 1, 1, 1, 1, 1}, 1}), std::invalid_argument);
}

TEST(OracleTest, AgreesWithPartitionOracleAndWitnessesValidate) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = 2 + rng() % 3;
    Task task;
    for (std::size_t k = 0; k < n; ++k) task.inputs.push_back(1 + Value(rng() % 30));
    task.target = 1 + Value(rng() % 60);
    const OracleResult r = OracleSolvable(task);
    EXPECT_EQ(r.solvable, PartitionOracle(task.inputs).Reaches(task.target))
        << TaskToJsonLine(task);
    if (r.solvable) EXPECT_TRUE(ValidateSolution(task, *r.witness));
  }
}

TEST(OracleTest, ResultDoesNotDependOnInputOrder) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Task task{{1 + Value(rng() % 20), 1 + Value(rng() % 20), 1 + Value(rng() % 20),
               1 + Value(rng() % 20)},
              1 + Value(rng() % 50)};
    Task rev{{task.inputs.rbegin(), task.inputs.rend()}, task.target};
    EXPECT_EQ(OracleSolvable(task).solvable, OracleSolvable(rev).solvable);
  }
}

TEST(SampleTasksTest, DeterministicAndSolvable) {
  SampleOptions so;
  so.n = 3;
  so.num_inputs = 4;
  so.max_target = 100;
  so.seed = 7;
  const auto a = SampleTasks(so);
  EXPECT_EQ(a, SampleTasks(so));
  ASSERT_EQ(a.size(), 3u);
  for (const Task& t : a) {
    EXPECT_EQ(t.inputs.size(), 4u);
    EXPECT_TRUE(OracleSolvable(t).solvable);
    EXPECT_TRUE(PartitionOracle(t.inputs).Reaches(t.target));
    for (Value v : t.inputs) {
      EXPECT_GE(v, 1);
      EXPECT_LE(v, 99);
    }
    EXPECT_LE(t.target, 100);
  }
}

TEST(SampleTasksTest, FiveInputVariant) {
  SampleOptions so;
  so.n = 1;
  so.num_inputs = 5;
  so.seed = 1;
  EXPECT_EQ(SampleTasks(so).at(0).inputs.size(), 5u);
}

TEST(SampleTasksTest, Errors) {
  SampleOptions so;
  so.n = 0;
  EXPECT_THROW(SampleTasks(so), std::invalid_argument);
  so.n = 5;
  so.num_inputs = 2;
  so.min_input = 1;
  so.max_input = 1;
  so.max_target = 100;
  so.max_attempts = 10;
  // {1,1} reaches only 1 and 2, so most targets are rejected.
  EXPECT_THROW(SampleTasks(so), std::runtime_error);
}

TEST(TaskIoTest, RoundTrip) {
  const std::vector<Task> tasks{{{1, 4, 6, 8}, 10}, {{22, 26, 31, 53}, 27}};
  const auto path = std::filesystem::temp_directory_path() / "apr_tasks_test.jsonl";
  WriteTasks(path, tasks);
  EXPECT_EQ(ReadTasks(path), tasks);
  std::filesystem::remove(path);
  EXPECT_THROW(ReadTasks(path), std::runtime_error);
  EXPECT_THROW(TaskFromJsonLine("{\"inputs\":[0],\"target\":1}"), std::invalid_argument);
  EXPECT_THROW(TaskFromJsonLine("not json"), std::runtime_error);
}

}  // namespace
}  // namespace apr
