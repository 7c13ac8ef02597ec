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

#include "apr/trace.h"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace apr {
namespace {

constexpr std::array<std::pair<ThreadEnd, std::string_view>, 6> kEndNames{{
    {ThreadEnd::kAnswered, "answered"},
    {ThreadEnd::kNoResult, "no_result"},
    {ThreadEnd::kBudgetExhausted, "budget_exhausted"},
    {ThreadEnd::kProtocolError, "protocol_error"},
    {ThreadEnd::kJoined, "joined"},
    {ThreadEnd::kFailed, "failed"},
}};

std::size_t Sequential(const Trace& trace, const ThreadRecord& thread) {
  std::size_t seq = thread.generated_tokens;
  for (const ThreadEvent& ev : thread.events) {
    const auto* spawn = std::get_if<SpawnEvent>(&ev);
    if (spawn == nullptr) continue;
    std::size_t longest = 0;
    for (ThreadId child : spawn->child_ids) {
      longest = std::max(longest, Sequential(trace, trace.threads.at(ToIndex(child))));
    }
    seq += longest;
  }
  return seq;
}

}  // namespace

std::string_view ToString(ThreadEnd end) {
  for (const auto& [e, name] : kEndNames) {
    if (e == end) return name;
  }
  return "unknown";
}

std::optional<ThreadEnd> ThreadEndFromString(std::string_view s) {
  for (const auto& [e, name] : kEndNames) {
    if (name == s) return e;
  }
  return std::nullopt;
}

std::size_t TotalTokens(const Trace& trace) {
  std::size_t total = 0;
  for (const auto& t : trace.threads) total += t.generated_tokens;
  return total;
}

std::size_t SequentialTokens(const Trace& trace) {
  if (trace.threads.empty()) return 0;
  return Sequential(trace, trace.root());
}

std::size_t ChildCount(const Trace& trace) {
  return trace.threads.empty() ? 0 : trace.threads.size() - 1;
}

std::size_t SpawnCount(const Trace& trace) {
  std::size_t n = 0;
  for (const auto& t : trace.threads) {
    for (const auto& ev : t.events) n += std::holds_alternative<SpawnEvent>(ev);
  }
  return n;
}

std::size_t MaxThreadTokens(const Trace& trace) {
  std::size_t m = 0;
  for (const auto& t : trace.threads) m = std::max(m, t.length_tokens());
  return m;
}

void CheckWellFormed(const Trace& trace) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("ill-formed trace: " + why);
  };
  if (trace.threads.empty()) fail("no threads");
  std::vector<int> spawned_by(trace.threads.size(), -1);
  for (std::size_t i = 0; i < trace.threads.size(); ++i) {
    const ThreadRecord& t = trace.threads[i];
    if (ToIndex(t.id) != i) fail("thread ids must equal their index");
    if (i == 0 && t.parent) fail("root has a parent");
    if (i > 0) {
      if (!t.parent || ToIndex(*t.parent) >= i) fail("unresolved parent");
      if (t.end != ThreadEnd::kJoined && t.end != ThreadEnd::kFailed) {
        fail("child must end with a join");
      }
      if (t.events.empty() || !std::holds_alternative<JoinEvent>(t.events.back())) {
        fail("child must end with a join event");
      }
      const auto& last = std::get<JoinEvent>(t.events.back());
      if (last.message.has_value() != (t.end == ThreadEnd::kJoined)) {
        fail("child join does not match its end state");
      }
    }
    std::size_t pending_joins = 0;
    for (std::size_t e = 0; e < t.events.size(); ++e) {
      const ThreadEvent& ev = t.events[e];
      if (const auto* spawn = std::get_if<SpawnEvent>(&ev)) {
        if (i > 0) fail("child threads cannot spawn");
        if (pending_joins != 0) fail("spawn while joins are pending");
        if (spawn->child_ids.empty() ||
            spawn->child_ids.size() != spawn->messages.size()) {
          fail("spawn needs one child per message");
        }
        for (ThreadId c : spawn->child_ids) {
          const auto ci = ToIndex(c);
          if (ci >= trace.threads.size() || ci == 0) fail("unknown child id");
          if (spawned_by[ci] != -1) fail("child spawned twice");
          if (trace.threads[ci].parent != t.id) fail("child parent mismatch");
          spawned_by[ci] = static_cast<int>(i);
        }
        pending_joins = spawn->child_ids.size();
      } else if (std::holds_alternative<JoinEvent>(ev)) {
        if (i == 0) {
          if (pending_joins == 0) fail("root join without spawn");
          --pending_joins;
        } else if (e + 1 != t.events.size()) {
          fail("events after a child's join");
        }
      } else if (pending_joins != 0) {
        fail("parent generated before all children joined");
      }
    }
    if (pending_joins != 0) fail("missing joins after spawn");
  }
  for (std::size_t i = 1; i < trace.threads.size(); ++i) {
    if (spawned_by[i] == -1) fail("child never spawned");
  }
}

}  // namespace apr
