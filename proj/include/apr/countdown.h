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

#ifndef APR_COUNTDOWN_H_
#define APR_COUNTDOWN_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace apr {

using Value = std::int64_t;

// Declaration order is the tie-break rank used by state expansion.
enum class Operator : std::uint8_t { kAdd = 0, kSub = 1, kMul = 2, kDiv = 3 };

// Applies `op` under the Countdown closure: every result is an integer >= 1
// and division must be exact. Returns nullopt for illegal applications
// (including int64 overflow).
std::optional<Value> Apply(Operator op, Value left, Value right);

bool IsCommutative(Operator op);

struct ArithOp {
  Value left = 0;
  Value right = 0;
  Operator op = Operator::kAdd;
  Value result = 0;

  bool operator==(const ArithOp&) const = default;
};

// Builds the op if it is legal.
std::optional<ArithOp> MakeOp(Operator op, Value left, Value right);

// A Countdown instance. `inputs` is kept in the order it was given; all
// multiset logic sorts internally.
struct Task {
  std::vector<Value> inputs;
  Value target = 0;

  bool operator==(const Task&) const = default;
};

// Throws std::invalid_argument when the task violates the basic invariants
// (nonempty inputs, every value >= 1, target >= 1).
void CheckTask(const Task& task);

struct Solution {
  std::vector<ArithOp> ops;

  bool operator==(const Solution&) const = default;
};

// True iff replaying `sol` against the task's input multiset consumes two
// available numbers per op, every op is legal, and exactly the target is left.
// Never throws.
bool ValidateSolution(const Task& task, const Solution& sol);

struct OracleResult {
  bool solvable = false;
  std::optional<Solution> witness;
};

inline constexpr std::size_t kOracleMaxInputs = 6;

// Exhaustive search over every pair/operator choice. Throws
// std::invalid_argument for more than kOracleMaxInputs numbers.
OracleResult OracleSolvable(const Task& task);

struct SampleOptions {
  std::size_t n = 1;
  std::size_t num_inputs = 4;
  Value max_target = 100;
  std::uint64_t seed = 0;
  Value min_input = 1;
  Value max_input = 99;
  // Total draws allowed across the whole call before giving up.
  std::size_t max_attempts = 1'000'000;
};

// Rejection-samples solvable tasks. Deterministic in `seed` on every
// platform. Throws std::invalid_argument on bad options and
// std::runtime_error when `max_attempts` is exhausted.
std::vector<Task> SampleTasks(const SampleOptions& opts);

// One JSON object per line: {"inputs":[...],"target":T}. Both throw
// std::runtime_error on I/O or parse failure.
std::vector<Task> ReadTasks(const std::filesystem::path& path);
void WriteTasks(const std::filesystem::path& path,
                const std::vector<Task>& tasks);

std::string TaskToJsonLine(const Task& task);
Task TaskFromJsonLine(const std::string& line);

}  // namespace apr

#endif  // APR_COUNTDOWN_H_
