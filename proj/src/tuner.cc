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


#include "apr/tuner.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "apr/metrics.h"
#include "apr/parallel.h"
#include "apr/random.h"
#include "apr/solvers.h"

namespace apr {
namespace {

constexpr std::size_t kDims = 4;
using Vec = std::array<double, kDims>;

constexpr std::array<ParamRange, kDims> kRanges{
    kPromisingRange, kBeamRange, kChildRange, kWidthBiasRange};

Vec Normalize(const PolicyParams& p) {
  const Vec raw{p.promising_p, static_cast<double>(p.beam_k),
                static_cast<double>(p.max_child_threads), p.spawn_width_bias};
  Vec u{};
  for (std::size_t d = 0; d < kDims; ++d) {
    u[d] = (raw[d] - kRanges[d].lo) / kRanges[d].span();
  }
  return u;
}

double Denormalize(const Vec& u, std::size_t d) {
  return kRanges[d].lo + std::clamp(u[d], 0.0, 1.0) * kRanges[d].span();
}

PolicyParams FromNormalized(const Vec& u) {
  PolicyParams p;
  p.promising_p = Denormalize(u, 0);
  p.beam_k = static_cast<std::size_t>(std::lround(Denormalize(u, 1)));
  p.max_child_threads = static_cast<std::size_t>(std::lround(Denormalize(u, 2)));
  p.spawn_width_bias = Denormalize(u, 3);
  return p;
}

bool Solved(const PolicyParams& params, const Task& task,
            const BudgetConfig& budget, std::uint64_t rng_seed,
            ValidationStats* acc) {
  ExpansionConfig cfg;
  cfg.beam_k = params.beam_k;
  cfg.promising_p = params.promising_p;
  cfg.rng_seed = rng_seed;
  BudgetConfig b = budget;
  b.max_child_threads = params.max_child_threads;
  SolveOutcome out = SolveApr(task, cfg, b, ThreadRuntime(), {},
                              params.spawn_width_bias);
  if (acc != nullptr) {
    acc->mean_child_count += static_cast<double>(ChildCount(*out.trace));
    acc->mean_total_tokens += static_cast<double>(TotalTokens(*out.trace));
  }
  return out.status == SolveStatus::kGoalReached;
}

// Integer parameters move by at most floor(clip * span) per step.
std::size_t LimitStep(std::size_t prev, std::size_t next, double limit) {
  const auto max_move = static_cast<long long>(std::floor(limit + 1e-9));
  const long long lo = static_cast<long long>(prev) - max_move;
  const long long hi = static_cast<long long>(prev) + max_move;
  return static_cast<std::size_t>(
      std::clamp(static_cast<long long>(next), std::max(0LL, lo), hi));
}

}  // namespace

void CheckParams(const PolicyParams& p) {
  auto in = [](double v, ParamRange r) { return v >= r.lo && v <= r.hi; };
  if (!in(p.promising_p, kPromisingRange) ||
      !in(static_cast<double>(p.beam_k), kBeamRange) ||
      !in(static_cast<double>(p.max_child_threads), kChildRange) ||
      !in(p.spawn_width_bias, kWidthBiasRange)) {
    throw std::invalid_argument("policy parameters out of range");
  }
}

std::vector<double> GroupAdvantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2) throw std::invalid_argument("group needs >= 2 rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double stddev = std::sqrt(var / n);
  std::vector<double> adv;
  adv.reserve(rewards.size());
  for (double r : rewards) adv.push_back((r - mean) / (stddev + kAdvantageEpsilon));
  return adv;
}

std::vector<double> GroupAdvantages(const RolloutGroup& group) {
  return GroupAdvantages(group.rewards);
}

void CheckTunerConfig(const TunerConfig& cfg) {
  if (!(cfg.clip_ratio >= 0.0)) throw std::invalid_argument("clip_ratio must be >= 0");
  if (cfg.eval_every == 0) throw std::invalid_argument("eval_every must be >= 1");
  if (cfg.batch_tasks == 0) throw std::invalid_argument("batch_tasks must be >= 1");
  if (cfg.group_size < 2) throw std::invalid_argument("group_size must be >= 2");
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(cfg.learning_rate >= 0.0)) {
    throw std::invalid_argument("learning_rate must be >= 0");
  }
  if (cfg.stall_limit == 0) throw std::invalid_argument("stall_limit must be >= 1");
  CheckBudget(cfg.budget);
}

ValidationStats Evaluate(const PolicyParams& params,
                         const std::vector<Task>& tasks,
                         const BudgetConfig& budget, std::uint64_t seed,
                         std::size_t threads) {
  CheckParams(params);
  if (tasks.empty()) throw std::invalid_argument("no validation tasks");
  std::vector<ValidationStats> per(tasks.size());
  std::vector<char> solved(tasks.size(), 0);
  ParallelFor(tasks.size(), threads, [&](std::size_t i) {
    solved[i] = Solved(params, tasks[i], budget, MixSeed(seed, i), &per[i]);
  });
  ValidationStats s;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    s.accuracy += solved[i];
    s.mean_child_count += per[i].mean_child_count;
    s.mean_total_tokens += per[i].mean_total_tokens;
  }
  const double n = static_cast<double>(tasks.size());
  s.accuracy /= n;
  s.mean_child_count /= n;
  s.mean_total_tokens /= n;
  return s;
}

TuneResult Tune(const PolicyParams& initial, const std::vector<Task>& train,
                const std::vector<Task>& validation, const TunerConfig& cfg,
                std::uint64_t seed) {
  CheckParams(initial);
  CheckTunerConfig(cfg);
  if (train.empty()) throw std::invalid_argument("no training tasks");
  const std::uint64_t val_seed = MixSeed(seed, 0x76616cULL);
  const std::array<bool, kDims> active{cfg.tune_promising_p, cfg.tune_beam_k,
                                       cfg.tune_max_child_threads,
                                       cfg.tune_spawn_width_bias};

  TuneResult result;
  result.params = initial;
  result.initial = Evaluate(initial, validation, cfg.budget, val_seed, cfg.threads);
  Vec u = Normalize(initial);
  const std::size_t G = cfg.group_size;
  const std::size_t B = cfg.batch_tasks;
  std::size_t stalled = 0;

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const std::uint64_t step_seed = MixSeed(seed, step);
    std::mt19937_64 rng(step_seed);
    std::vector<Vec> noise(B * G);
    for (Vec& e : noise) {
      for (std::size_t d = 0; d < kDims; ++d) e[d] = active[d] ? StandardNormal(rng) : 0.0;
    }
    std::vector<double> rewards(B * G, 0.0);
    ParallelFor(B * G, cfg.threads, [&](std::size_t k) {
      Vec probe = u;
      for (std::size_t d = 0; d < kDims; ++d) probe[d] += cfg.sigma * noise[k][d];
      const Task& task = train[((step - 1) * B + k / G) % train.size()];
      rewards[k] = Solved(FromNormalized(probe), task, cfg.budget,
                          MixSeed(step_seed, k), nullptr)
                       ? 1.0
                       : 0.0;
    });

    Vec grad{};
    bool any_signal = false;
    for (std::size_t j = 0; j < B; ++j) {
      std::vector<double> group(rewards.begin() + j * G,
                                rewards.begin() + (j + 1) * G);
      const std::vector<double> adv = GroupAdvantages(group);
      for (std::size_t i = 0; i < G; ++i) {
        if (adv[i] != 0.0) any_signal = true;
        for (std::size_t d = 0; d < kDims; ++d) grad[d] += adv[i] * noise[j * G + i][d];
      }
    }
    stalled = any_signal ? 0 : stalled + 1;

    const PolicyParams prev = result.params;
    Vec delta{};
    for (std::size_t d = 0; d < kDims; ++d) {
      delta[d] = std::clamp(cfg.learning_rate * cfg.sigma * grad[d] /
                                static_cast<double>(B * G),
                            -cfg.clip_ratio, cfg.clip_ratio);
      u[d] = std::clamp(u[d] + delta[d], 0.0, 1.0);
    }
    PolicyParams next = FromNormalized(u);
    next.beam_k = LimitStep(prev.beam_k, next.beam_k,
                            cfg.clip_ratio * kBeamRange.span());
    next.max_child_threads = LimitStep(prev.max_child_threads, next.max_child_threads,
                                       cfg.clip_ratio * kChildRange.span());
    // Avoid drift from the normalize round trip on coordinates that did not move.
    if (delta[0] == 0.0) next.promising_p = prev.promising_p;
    if (delta[3] == 0.0) next.spawn_width_bias = prev.spawn_width_bias;
    result.params = next;
    result.trajectory.push_back(next);

    if (step % cfg.eval_every == 0) {
      result.curve.push_back(
          {step, Evaluate(next, validation, cfg.budget, val_seed, cfg.threads), next});
    }
    if (stalled >= cfg.stall_limit) {
      result.early_stopped = true;
      result.diagnostic = "every rollout group had identical rewards for " +
                          std::to_string(stalled) +
                          " consecutive steps; stopped at step " +
                          std::to_string(step);
      break;
    }
  }
  return result;
}

void WriteLearningCurve(const std::filesystem::path& path,
                        const std::vector<LearningCurveRow>& curve) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,validation_accuracy,promising_p,beam_k,mean_child_count,"
         "mean_total_tokens\n";
  for (const LearningCurveRow& r : curve) {
    out << r.step << ',' << FormatNumber(r.stats.accuracy) << ','
        << FormatNumber(r.params.promising_p) << ',' << r.params.beam_k << ','
        << FormatNumber(r.stats.mean_child_count) << ','
        << FormatNumber(r.stats.mean_total_tokens) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

bool WidthSensitive(const Task& task, const ExpansionConfig& cfg,
                    const BudgetConfig& budget, std::size_t children) {
  BudgetConfig wide = budget;
  wide.max_child_threads = std::max(wide.max_child_threads, children);
  wide.enforce_child_count = children;
  BudgetConfig none = budget;
  none.max_child_threads = 0;
  none.enforce_child_count.reset();
  return SolveApr(task, cfg, wide).status == SolveStatus::kGoalReached &&
         SolveApr(task, cfg, none).status != SolveStatus::kGoalReached;
}

}  // namespace apr
