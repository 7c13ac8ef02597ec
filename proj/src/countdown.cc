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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "apr/random.h"
#include "json.hpp"

namespace apr {

double StandardNormal(std::mt19937_64& rng) {
  double u1 = UniformUnit(rng);
  while (u1 <= 0.0) u1 = UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::optional<Value> Apply(Operator op, Value left, Value right) {
  Value out = 0;
  switch (op) {
    case Operator::kAdd:
      if (__builtin_add_overflow(left, right, &out)) return std::nullopt;
      break;
    case Operator::kSub:
      if (__builtin_sub_overflow(left, right, &out)) return std::nullopt;
      break;
    case Operator::kMul:
      if (__builtin_mul_overflow(left, right, &out)) return std::nullopt;
      break;
    case Operator::kDiv:
      if (right == 0 || left % right != 0) return std::nullopt;
      out = left / right;
      break;
  }
  if (out < 1) return std::nullopt;
  return out;
}

bool IsCommutative(Operator op) {
  return op == Operator::kAdd || op == Operator::kMul;
}

std::optional<ArithOp> MakeOp(Operator op, Value left, Value right) {
  auto result = Apply(op, left, right);
  if (!result) return std::nullopt;
  return ArithOp{left, right, op, *result};
}

void CheckTask(const Task& task) {
  if (task.inputs.empty()) throw std::invalid_argument("task has no inputs");
  for (Value v : task.inputs) {
    if (v < 1) throw std::invalid_argument("task input must be >= 1");
  }
  if (task.target < 1) throw std::invalid_argument("task target must be >= 1");
}

namespace {

bool RemoveOne(std::vector<Value>& pool, Value v) {
  auto it = std::find(pool.begin(), pool.end(), v);
  if (it == pool.end()) return false;
  pool.erase(it);
  return true;
}

using Multiset = std::vector<Value>;  // sorted

struct OracleSearch {
  Value target;
  std::set<Multiset> dead;
  std::vector<ArithOp> path;

  bool Solve(const Multiset& nums) {
    if (nums.size() == 1) return nums[0] == target;
    if (dead.contains(nums)) return false;
    for (std::size_t i = 0; i < nums.size(); ++i) {
      for (std::size_t j = 0; j < nums.size(); ++j) {
        if (i == j) continue;
        for (Operator op : {Operator::kAdd, Operator::kSub, Operator::kMul,
                            Operator::kDiv}) {
          auto made = MakeOp(op, nums[i], nums[j]);
          if (!made) continue;
          Multiset next;
          next.reserve(nums.size() - 1);
          for (std::size_t k = 0; k < nums.size(); ++k) {
            if (k != i && k != j) next.push_back(nums[k]);
          }
          next.insert(std::upper_bound(next.begin(), next.end(), made->result),
                      made->result);
          path.push_back(*made);
          if (Solve(next)) return true;
          path.pop_back();
        }
      }
    }
    dead.insert(nums);
    return false;
  }
};

}  // namespace

bool ValidateSolution(const Task& task, const Solution& sol) {
  if (task.inputs.empty() || task.target < 1) return false;
  std::vector<Value> pool = task.inputs;
  for (const ArithOp& op : sol.ops) {
    auto result = Apply(op.op, op.left, op.right);
    if (!result || *result != op.result) return false;
    if (!RemoveOne(pool, op.left) || !RemoveOne(pool, op.right)) return false;
    pool.push_back(op.result);
  }
  return pool.size() == 1 && pool[0] == task.target;
}

OracleResult OracleSolvable(const Task& task) {
  if (task.inputs.size() > kOracleMaxInputs) {
    throw std::invalid_argument("oracle supports at most 6 inputs");
  }
  if (task.inputs.empty()) return {};
  Multiset nums = task.inputs;
  std::sort(nums.begin(), nums.end());
  OracleSearch search{task.target, {}, {}};
  if (!search.Solve(nums)) return {};
  return {true, Solution{std::move(search.path)}};
}

std::vector<Task> SampleTasks(const SampleOptions& opts) {
  if (opts.n == 0) throw std::invalid_argument("n must be >= 1");
  if (opts.num_inputs < 2 || opts.num_inputs > 5) {
    throw std::invalid_argument("num_inputs must be in [2, 5]");
  }
  if (opts.max_target < 1 || opts.min_input < 1 ||
      opts.max_input < opts.min_input) {
    throw std::invalid_argument("bad sampling ranges");
  }
  std::mt19937_64 rng(opts.seed);
  const auto input_span =
      static_cast<std::uint64_t>(opts.max_input - opts.min_input + 1);
  std::vector<Task> tasks;
  tasks.reserve(opts.n);
  std::size_t attempts = 0;
  while (tasks.size() < opts.n) {
    if (attempts++ >= opts.max_attempts) {
      throw std::runtime_error("task sampling exceeded the attempt cap");
    }
    Task task;
    for (std::size_t i = 0; i < opts.num_inputs; ++i) {
      task.inputs.push_back(opts.min_input +
                            static_cast<Value>(UniformBelow(rng, input_span)));
    }
    task.target =
        1 + static_cast<Value>(
                UniformBelow(rng, static_cast<std::uint64_t>(opts.max_target)));
    if (OracleSolvable(task).solvable) tasks.push_back(std::move(task));
  }
  return tasks;
}

std::string TaskToJsonLine(const Task& task) {
  nlohmann::json j;
  j["inputs"] = task.inputs;
  j["target"] = task.target;
  return j.dump();
}

Task TaskFromJsonLine(const std::string& line) {
  Task task;
  try {
    auto j = nlohmann::json::parse(line);
    task.inputs = j.at("inputs").get<std::vector<Value>>();
    task.target = j.at("target").get<Value>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad task record: ") + e.what());
  }
  CheckTask(task);
  return task;
}

std::vector<Task> ReadTasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file " + path.string());
  std::vector<Task> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      tasks.push_back(TaskFromJsonLine(line));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("bad task record: ") + e.what());
    }
  }
  return tasks;
}

void WriteTasks(const std::filesystem::path& path,
                const std::vector<Task>& tasks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write task file " + path.string());
  for (const Task& t : tasks) out << TaskToJsonLine(t) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace apr
