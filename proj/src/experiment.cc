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


#include "apr/experiment.h"

#include <charconv>
#include <stdexcept>

#include "apr/parallel.h"
#include "apr/random.h"

namespace apr {

MethodSpec ParseMethod(std::string_view text) {
  if (text == "sos+") return {SearchMode::kSosPlus, std::nullopt};
  if (text == "apr") return {SearchMode::kApr, std::nullopt};
  if (text.starts_with("apr@")) {
    std::string_view digits = text.substr(4);
    std::size_t n = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && end == digits.data() + digits.size() && !digits.empty() &&
        n <= kMaxChildThreads) {
      return {SearchMode::kApr, n};
    }
  }
  throw std::invalid_argument("unknown method '" + std::string(text) +
                              "' (expected sos+, apr or apr@N with N <= 10)");
}

std::string ToString(const MethodSpec& spec) {
  if (spec.mode == SearchMode::kSosPlus) return "sos+";
  if (spec.children) return "apr@" + std::to_string(*spec.children);
  return "apr";
}

std::vector<SolveOutcome> RunMethod(const std::vector<Task>& tasks,
                                    const MethodSpec& spec,
                                    const RunSettings& settings,
                                    std::uint64_t sample) {
  CheckExpansionConfig(settings.expansion);
  CheckBudget(settings.budget);
  CheckPool(settings.pool);
  BudgetConfig budget = settings.budget;
  if (spec.children) {
    budget.enforce_child_count = *spec.children;
    budget.max_child_threads = std::max(budget.max_child_threads, *spec.children);
  }
  const std::uint64_t base = MixSeed(settings.expansion.rng_seed, sample);
  std::vector<SolveOutcome> out(tasks.size());
  ParallelFor(tasks.size(), settings.threads, [&](std::size_t i) {
    ExpansionConfig cfg = settings.expansion;
    cfg.rng_seed = MixSeed(base, i);
    out[i] = spec.mode == SearchMode::kSosPlus
                 ? SolveSosPlus(tasks[i], cfg, budget)
                 : SolveApr(tasks[i], cfg, budget, ThreadRuntime(), settings.pool,
                            settings.spawn_width_bias);
  });
  return out;
}

EvalReport MakeReport(const MethodSpec& spec, std::string config,
                      const std::vector<SolveOutcome>& outcomes,
                      const WorkerPool& pool) {
  EvalReport rep;
  rep.method = ToString(spec);
  rep.config = std::move(config);
  rep.pool = pool;
  for (const SolveOutcome& o : outcomes) rep.rows.push_back(MakeRow(o, pool));
  return rep;
}

}  // namespace apr
