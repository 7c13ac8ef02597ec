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


// Batch runs shared by the command line tool, the acceptance suite and the
// Python module.

#ifndef APR_EXPERIMENT_H_
#define APR_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apr/metrics.h"
#include "apr/runtime.h"
#include "apr/search.h"
#include "apr/solvers.h"

namespace apr {

struct MethodSpec {
  SearchMode mode = SearchMode::kSosPlus;
  // APR only: force this many children.
  std::optional<std::size_t> children;

  bool operator==(const MethodSpec&) const = default;
};

// "sos+", "apr", or "apr@N" for N forced children. Throws
// std::invalid_argument otherwise.
MethodSpec ParseMethod(std::string_view text);
std::string ToString(const MethodSpec& spec);

struct RunSettings {
  ExpansionConfig expansion;
  BudgetConfig budget;
  double spawn_width_bias = 0.0;
  WorkerPool pool;
  std::size_t threads = 1;
};

// Solves every task. Task i of sample s uses expansion seed
// MixSeed(MixSeed(expansion.rng_seed, s), i).
std::vector<SolveOutcome> RunMethod(const std::vector<Task>& tasks,
                                    const MethodSpec& spec,
                                    const RunSettings& settings,
                                    std::uint64_t sample = 0);

EvalReport MakeReport(const MethodSpec& spec, std::string config,
                      const std::vector<SolveOutcome>& outcomes,
                      const WorkerPool& pool);

}  // namespace apr

#endif  // APR_EXPERIMENT_H_
