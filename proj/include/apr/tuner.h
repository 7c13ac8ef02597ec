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


// Group-relative tuning of the symbolic policy's knobs.
//
// GRPO's policy gradient has nothing to act on in a four-number parameter
// vector, so each step samples G perturbed parameter sets per task, scores
// them with the task reward, normalizes rewards within the group, and moves
// the parameters along the advantage-weighted perturbation. The per-step
// move is clipped to clip_ratio times each parameter's range.

#ifndef APR_TUNER_H_
#define APR_TUNER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "apr/countdown.h"
#include "apr/runtime.h"
#include "apr/search.h"

namespace apr {

struct PolicyParams {
  double promising_p = 0.1;
  std::size_t beam_k = 5;
  std::size_t max_child_threads = 10;
  double spawn_width_bias = 0.0;

  bool operator==(const PolicyParams&) const = default;
};

struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;
  double span() const { return hi - lo; }
};

inline constexpr ParamRange kPromisingRange{0.0, 1.0};
inline constexpr ParamRange kBeamRange{1.0, 15.0};
inline constexpr ParamRange kChildRange{0.0, 10.0};
inline constexpr ParamRange kWidthBiasRange{-4.0, 0.0};

// Throws std::invalid_argument when a field is outside its range.
void CheckParams(const PolicyParams& params);

struct RolloutGroup {
  Task task;
  std::vector<double> rewards;
};

inline constexpr double kAdvantageEpsilon = 1e-8;

// (r - mean) / (population std + 1e-8). Throws for fewer than two rewards.
std::vector<double> GroupAdvantages(const std::vector<double>& rewards);
std::vector<double> GroupAdvantages(const RolloutGroup& group);

struct TunerConfig {
  double clip_ratio = 0.2;
  std::size_t steps = 150;
  std::size_t eval_every = 25;
  std::size_t batch_tasks = 64;
  std::size_t group_size = 5;
  // Perturbation scale and step size, both in range-normalized units.
  double sigma = 0.1;
  double learning_rate = 1.0;
  // Stop after this many consecutive steps whose groups all had equal
  // rewards.
  std::size_t stall_limit = 10;
  bool tune_promising_p = true;
  bool tune_beam_k = true;
  bool tune_max_child_threads = true;
  bool tune_spawn_width_bias = true;
  BudgetConfig budget;
  std::size_t threads = 1;
};

// Throws std::invalid_argument on bad fields. clip_ratio may be 0, which
// freezes the parameters.
void CheckTunerConfig(const TunerConfig& cfg);

struct ValidationStats {
  double accuracy = 0.0;
  double mean_child_count = 0.0;
  double mean_total_tokens = 0.0;
};

// APR with `params` on every task; task i uses expansion seed
// MixSeed(seed, i). Reward-equivalent: solved means a validating answer
// within the budget.
ValidationStats Evaluate(const PolicyParams& params,
                         const std::vector<Task>& tasks,
                         const BudgetConfig& budget, std::uint64_t seed,
                         std::size_t threads = 1);

struct LearningCurveRow {
  std::size_t step = 0;
  ValidationStats stats;
  PolicyParams params;
};

struct TuneResult {
  PolicyParams params;
  ValidationStats initial;
  std::vector<LearningCurveRow> curve;
  // Parameters after every completed step.
  std::vector<PolicyParams> trajectory;
  bool early_stopped = false;
  std::string diagnostic;
};

// Deterministic in `seed`. Throws std::invalid_argument on empty task sets.
TuneResult Tune(const PolicyParams& initial, const std::vector<Task>& train,
                const std::vector<Task>& validation, const TunerConfig& cfg,
                std::uint64_t seed);

// step,validation_accuracy,promising_p,beam_k,mean_child_count,
// mean_total_tokens
void WriteLearningCurve(const std::filesystem::path& path,
                        const std::vector<LearningCurveRow>& curve);

// True when APR with `children` forced children solves the task and the
// same search with no children does not.
bool WidthSensitive(const Task& task, const ExpansionConfig& cfg,
                    const BudgetConfig& budget, std::size_t children = 10);

}  // namespace apr

#endif  // APR_TUNER_H_
