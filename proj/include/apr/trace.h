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

#ifndef APR_TRACE_H_
#define APR_TRACE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "apr/countdown.h"

namespace apr {

enum class ThreadId : std::uint32_t {};

constexpr std::uint32_t ToIndex(ThreadId id) {
  return static_cast<std::uint32_t>(id);
}

inline constexpr ThreadId kRootThread{0};

// A line the thread generated itself.
struct StepEvent {
  std::string text;
  bool operator==(const StepEvent&) const = default;
};

// The thread asked for one child per message. Children are numbered in
// message order.
struct SpawnEvent {
  std::vector<ThreadId> child_ids;
  std::vector<std::string> messages;
  bool operator==(const SpawnEvent&) const = default;
};

// In a child: the terminating join the child generated. In a parent: the
// message a child returned, appended to the parent's context after the
// barrier. A missing message is the failure sentinel.
struct JoinEvent {
  std::optional<std::string> message;
  bool operator==(const JoinEvent&) const = default;
};

using ThreadEvent = std::variant<StepEvent, SpawnEvent, JoinEvent>;

enum class ThreadEnd : std::uint8_t {
  kAnswered,        // root produced an answer
  kNoResult,        // root exhausted its search
  kBudgetExhausted, // root hit its context cap
  kProtocolError,   // root broke the spawn/join contract
  kJoined,          // child returned a message
  kFailed,          // child returned the failure sentinel
};

std::string_view ToString(ThreadEnd end);
std::optional<ThreadEnd> ThreadEndFromString(std::string_view s);

struct ThreadRecord {
  ThreadId id{};
  std::optional<ThreadId> parent;
  // Prefix the thread was started with: the task for the root, the spawn
  // message for a child.
  std::string context;
  std::vector<ThreadEvent> events;
  // Prefix plus joined-in messages; prefilled, never generated.
  std::size_t context_tokens = 0;
  std::size_t generated_tokens = 0;
  ThreadEnd end = ThreadEnd::kNoResult;

  std::size_t length_tokens() const { return context_tokens + generated_tokens; }
  bool operator==(const ThreadRecord&) const = default;
};

struct Trace {
  // Index == thread id; threads[0] is the root.
  std::vector<ThreadRecord> threads;
  // Stored in the order produced by parsing the root's answer line.
  std::optional<Solution> answer;
  // Simulated generation time per thread, in milliseconds.
  std::vector<double> thread_ms;
  // Runtime notes (protocol errors, overflows). Not part of the text form.
  std::vector<std::string> diagnostics;

  const ThreadRecord& root() const { return threads.at(0); }
  ThreadEnd status() const { return root().end; }
};

// Sum of generated tokens over every thread.
std::size_t TotalTokens(const Trace& trace);

// Longest causal chain of generated tokens: the parent's own tokens plus,
// for each spawn, the longest child.
std::size_t SequentialTokens(const Trace& trace);

std::size_t ChildCount(const Trace& trace);
std::size_t SpawnCount(const Trace& trace);

// Largest context-window footprint over all threads.
std::size_t MaxThreadTokens(const Trace& trace);

// Throws std::invalid_argument when ids, parents, or spawn/join structure
// are inconsistent (the checks encode() relies on).
void CheckWellFormed(const Trace& trace);

}  // namespace apr

#endif  // APR_TRACE_H_
