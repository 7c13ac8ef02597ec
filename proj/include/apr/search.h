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

#ifndef APR_SEARCH_H_
#define APR_SEARCH_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "apr/countdown.h"

namespace apr {

// A node of the Countdown search tree. `remaining` is sorted ascending.
struct SearchState {
  std::vector<Value> remaining;
  Value target = 0;
  std::vector<ArithOp> path;

  static SearchState Start(const Task& task);

  bool IsGoal() const { return remaining.size() == 1 && remaining[0] == target; }

  // Successor after applying `op`; `op`'s operands must be present.
  SearchState After(const ArithOp& op) const;

  bool operator==(const SearchState&) const = default;
};

struct HeuristicScore {
  std::uint64_t value = 0;

  auto operator<=>(const HeuristicScore&) const = default;
};

inline constexpr std::size_t kUnboundedBeam =
    std::numeric_limits<std::size_t>::max();

struct ExpansionConfig {
  std::size_t beam_k = 5;
  double promising_p = 0.1;
  std::uint64_t rng_seed = 0;
};

// Throws std::invalid_argument when beam_k == 0 or promising_p is outside
// [0, 1].
void CheckExpansionConfig(const ExpansionConfig& cfg);

// Divisors of `target` in ascending order, found by trial division.
std::vector<Value> Factors(Value target);

// min over factors f of the target of |f - sum(remaining)|. Lower is better.
// Requires a nonempty `remaining`.
HeuristicScore HMultiply(const SearchState& state);

// Every legal op over distinct value pairs of `state.remaining`, larger
// operand first, one entry per commutative pair.
std::vector<ArithOp> LegalOps(const SearchState& state);

// Successors ranked by (heuristic, operator rank, smaller operand, larger
// operand) and truncated to cfg.beam_k. Empty when fewer than two numbers
// remain.
std::vector<SearchState> Expand(const SearchState& state,
                                const ExpansionConfig& cfg);

// Stable across runs and platforms; covers target, remaining and path.
std::uint64_t Fingerprint(const SearchState& state);

// Bernoulli(cfg.promising_p) keyed on (cfg.rng_seed, Fingerprint(state)), so
// the same state always gets the same verdict under one seed. States with
// fewer than two numbers are never promising.
bool IsPromising(const SearchState& state, const ExpansionConfig& cfg);

}  // namespace apr

#endif  // APR_SEARCH_H_
