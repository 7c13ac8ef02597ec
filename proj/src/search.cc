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

#include "apr/search.h"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "apr/random.h"

namespace apr {

SearchState SearchState::Start(const Task& task) {
  SearchState s;
  s.remaining = task.inputs;
  std::sort(s.remaining.begin(), s.remaining.end());
  s.target = task.target;
  return s;
}

SearchState SearchState::After(const ArithOp& op) const {
  SearchState next;
  next.target = target;
  next.remaining = remaining;
  for (Value v : {op.left, op.right}) {
    auto it = std::find(next.remaining.begin(), next.remaining.end(), v);
    if (it == next.remaining.end()) {
      throw std::logic_error("operand not available in state");
    }
    next.remaining.erase(it);
  }
  next.remaining.insert(std::upper_bound(next.remaining.begin(),
                                         next.remaining.end(), op.result),
                        op.result);
  next.path = path;
  next.path.push_back(op);
  return next;
}

void CheckExpansionConfig(const ExpansionConfig& cfg) {
  if (cfg.beam_k == 0) throw std::invalid_argument("beam_k must be >= 1");
  if (!(cfg.promising_p >= 0.0 && cfg.promising_p <= 1.0)) {
    throw std::invalid_argument("promising_p must be in [0, 1]");
  }
}

std::vector<Value> Factors(Value target) {
  std::vector<Value> low, high;
  for (Value d = 1; d <= target / d; ++d) {
    if (target % d != 0) continue;
    low.push_back(d);
    if (d != target / d) high.push_back(target / d);
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

HeuristicScore HMultiply(const SearchState& state) {
  if (state.remaining.empty()) {
    throw std::invalid_argument("heuristic needs a nonempty state");
  }
  Value sum = 0;
  for (Value v : state.remaining) {
    if (__builtin_add_overflow(sum, v, &sum)) {
      sum = std::numeric_limits<Value>::max();
      break;
    }
  }
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (Value f : Factors(state.target)) {
    const std::uint64_t d = f > sum ? static_cast<std::uint64_t>(f - sum)
                                    : static_cast<std::uint64_t>(sum - f);
    best = std::min(best, d);
  }
  return {best};
}

std::vector<ArithOp> LegalOps(const SearchState& state) {
  std::vector<ArithOp> ops;
  const auto& nums = state.remaining;
  for (std::size_t i = 0; i < nums.size(); ++i) {
    if (i > 0 && nums[i] == nums[i - 1]) continue;
    for (std::size_t j = i + 1; j < nums.size(); ++j) {
      if (j > i + 1 && nums[j] == nums[j - 1]) continue;
      // nums is sorted, so nums[j] >= nums[i]; the larger operand goes left.
      const Value big = nums[j];
      const Value small = nums[i];
      for (Operator op : {Operator::kAdd, Operator::kSub, Operator::kMul,
                          Operator::kDiv}) {
        if (auto made = MakeOp(op, big, small)) ops.push_back(*made);
      }
    }
  }
  return ops;
}

std::vector<SearchState> Expand(const SearchState& state,
                                const ExpansionConfig& cfg) {
  CheckExpansionConfig(cfg);
  if (state.remaining.size() < 2) return {};
  struct Ranked {
    HeuristicScore score;
    ArithOp op;
    SearchState next;
  };
  std::vector<Ranked> ranked;
  for (const ArithOp& op : LegalOps(state)) {
    SearchState next = state.After(op);
    HeuristicScore score = HMultiply(next);
    ranked.push_back({score, op, std::move(next)});
  }
  auto key = [](const Ranked& r) {
    return std::make_tuple(r.score, static_cast<int>(r.op.op),
                           std::min(r.op.left, r.op.right),
                           std::max(r.op.left, r.op.right));
  };
  std::sort(ranked.begin(), ranked.end(),
            [&](const Ranked& a, const Ranked& b) { return key(a) < key(b); });
  if (ranked.size() > cfg.beam_k) ranked.resize(cfg.beam_k);
  std::vector<SearchState> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.next));
  return out;
}

std::uint64_t Fingerprint(const SearchState& state) {
  Fnv1a h;
  h.Add(static_cast<std::uint64_t>(state.target));
  h.Add(static_cast<std::uint64_t>(state.remaining.size()));
  for (Value v : state.remaining) h.Add(static_cast<std::uint64_t>(v));
  h.Add(static_cast<std::uint64_t>(state.path.size()));
  for (const ArithOp& op : state.path) {
    h.Add(static_cast<std::uint64_t>(op.left));
    h.Add(static_cast<std::uint64_t>(op.right));
    h.Add(static_cast<std::uint64_t>(op.op));
    h.Add(static_cast<std::uint64_t>(op.result));
  }
  return h.digest();
}

bool IsPromising(const SearchState& state, const ExpansionConfig& cfg) {
  if (state.remaining.size() < 2) return false;
  if (cfg.promising_p <= 0.0) return false;
  if (cfg.promising_p >= 1.0) return true;
  const double u = ToUnitInterval(MixSeed(cfg.rng_seed, Fingerprint(state)));
  return u < cfg.promising_p;
}

}  // namespace apr
