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

// Canonical text form of search traces.
//
// Every thread is a prefix (its context) followed by one line per event:
//
//   Current State: 27:[22,26,31,53], Operations: []
//   Exploring Operation: 53−26=27
//   <SPAWN> [ Current State: ... || Current State: ... ] </SPAWN>
//   <JOIN> Operations: [53−26=27, ...] </JOIN>
//   <JOIN> FAIL </JOIN>
//   Answer: (8−6)×(4+1) = 10
//
// Subtraction, multiplication and division use U+2212, U+00D7 and U+00F7
// so that the lexical tokenizer splits them like every other operator.

#ifndef APR_CODEC_H_
#define APR_CODEC_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apr/countdown.h"
#include "apr/search.h"
#include "apr/trace.h"

namespace apr {

// Insert spaces around ( ) [ ] , : = + − × ÷ < > / and count the
// whitespace-separated lexemes.
std::size_t CountTokens(std::string_view text);

inline constexpr std::string_view kSpawnOpen = "<SPAWN>";
inline constexpr std::string_view kSpawnClose = "</SPAWN>";
inline constexpr std::string_view kJoinOpen = "<JOIN>";
inline constexpr std::string_view kJoinClose = "</JOIN>";
inline constexpr std::string_view kFailSentinel = "FAIL";
inline constexpr std::string_view kMessageSeparator = "||";

std::string_view OperatorSymbol(Operator op);

std::string RenderOp(const ArithOp& op);                  // 8−6=2
std::string RenderOps(const std::vector<ArithOp>& ops);   // [8−6=2, 4+1=5]
std::string RenderState(const SearchState& state);        // Current State: ...
std::string RenderExplore(const ArithOp& op);             // Exploring ...
std::string RenderSpawn(const std::vector<std::string>& messages);
std::string RenderJoin(const std::optional<std::string>& message);
// Join payload for a solved child: "Operations: [...]".
std::string RenderSolutionMessage(const std::vector<ArithOp>& ops);
// Answer: <expr> = T. `task` supplies the leaves; `sol` must validate.
std::string RenderAnswer(const Task& task, const Solution& sol);
std::string RenderExpression(const Task& task, const Solution& sol);

std::optional<ArithOp> ParseOp(std::string_view text);
std::optional<std::vector<ArithOp>> ParseOps(std::string_view text);
std::optional<SearchState> ParseState(std::string_view text);
std::optional<std::vector<ArithOp>> ParseSolutionMessage(std::string_view text);

// Ops of an expression in post-order, left subtree first.
std::optional<Solution> ParseExpression(std::string_view text);

struct ParsedAnswer {
  Solution solution;
  Value target = 0;
};
std::optional<ParsedAnswer> ParseAnswer(std::string_view line);

// Markers never appear inside payloads: '<' is written as the six-character
// escape backslash-u-003c.
std::string EscapePayload(std::string_view payload);
std::string UnescapePayload(std::string_view payload);

// One parsed line of a thread's continuation.
struct SpawnLine {
  std::vector<std::string> messages;
};
struct JoinLine {
  std::optional<std::string> message;
};
struct AnswerLine {
  Solution solution;
};
struct PlainLine {
  std::string text;
};
struct MalformedLine {
  std::string reason;
};
using ParsedLine =
    std::variant<PlainLine, SpawnLine, JoinLine, AnswerLine, MalformedLine>;
ParsedLine ParseLine(std::string_view line);

struct ThreadText {
  ThreadId id{};
  std::optional<ThreadId> parent;
  std::string context;
  std::string generated;  // newline-separated event lines
  bool operator==(const ThreadText&) const = default;
};

struct TraceText {
  std::vector<ThreadText> threads;
  ThreadEnd status = ThreadEnd::kNoResult;
  bool operator==(const TraceText&) const = default;
};

// Per-thread token counts of the canonical text.
struct TokenCount {
  std::vector<std::size_t> per_thread;
  std::size_t total = 0;
};
TokenCount CountTraceTokens(const TraceText& text);

// Throws std::invalid_argument on ill-formed traces.
TraceText Encode(const Trace& trace);

// Rebuilds threads, token counts, end states and the answer. Thread timing
// is recomputed at `per_token_ms`. Throws std::invalid_argument on text that
// does not follow the grammar.
Trace Decode(const TraceText& text, double per_token_ms = 0.0);

// The full text of one thread as a model would see it.
std::string ThreadString(const ThreadText& thread);

enum class ConditionKind : std::uint8_t { kLengthBin, kChildCount };

struct ConditionTag {
  ConditionKind kind = ConditionKind::kLengthBin;
  std::size_t value = 0;
  bool operator==(const ConditionTag&) const = default;
};

inline constexpr std::size_t kLengthBinTokens = 512;

// Smallest positive multiple of 512 that is >= total_tokens.
ConditionTag LengthBinTag(std::size_t total_tokens);
// Throws std::invalid_argument above 10 children.
ConditionTag ChildCountTag(std::size_t children);

std::string_view ToString(ConditionKind kind);

}  // namespace apr

#endif  // APR_CODEC_H_
