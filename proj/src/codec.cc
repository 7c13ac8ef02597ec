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

#include "apr/codec.h"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace apr {
namespace {

constexpr std::string_view kMinus = "\xE2\x88\x92";   // U+2212
constexpr std::string_view kTimes = "\xC3\x97";       // U+00D7
constexpr std::string_view kDivide = "\xC3\xB7";      // U+00F7
constexpr std::string_view kStatePrefix = "Current State: ";
constexpr std::string_view kOpsLabel = ", Operations: ";
constexpr std::string_view kExplorePrefix = "Exploring Operation: ";
constexpr std::string_view kAnswerPrefix = "Answer:";
constexpr std::string_view kMessagePrefix = "Operations: ";

// Byte length of the punctuation symbol at text[i], or 0.
std::size_t PunctuationLength(std::string_view text, std::size_t i) {
  switch (text[i]) {
    case '(': case ')': case '[': case ']': case ',': case ':':
    case '=': case '+': case '<': case '>': case '/':
      return 1;
    default:
      break;
  }
  const std::string_view rest = text.substr(i);
  if (rest.starts_with(kMinus)) return kMinus.size();
  if (rest.starts_with(kTimes)) return kTimes.size();
  if (rest.starts_with(kDivide)) return kDivide.size();
  return 0;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

// Reads a positive decimal integer from the front of `s`.
std::optional<Value> TakeNumber(std::string_view& s) {
  Value v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr == s.data()) return std::nullopt;
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return v;
}

bool TakeLiteral(std::string_view& s, std::string_view lit) {
  if (!s.starts_with(lit)) return false;
  s.remove_prefix(lit.size());
  return true;
}

void SkipSpaces(std::string_view& s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
}

// Accepts the canonical symbols plus ASCII stand-ins from external models.
std::optional<Operator> TakeOperator(std::string_view& s) {
  if (TakeLiteral(s, "+")) return Operator::kAdd;
  if (TakeLiteral(s, kMinus) || TakeLiteral(s, "-")) return Operator::kSub;
  if (TakeLiteral(s, kTimes) || TakeLiteral(s, "*")) return Operator::kMul;
  if (TakeLiteral(s, kDivide) || TakeLiteral(s, "/")) return Operator::kDiv;
  return std::nullopt;
}

std::vector<std::string_view> Split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

bool ContainsMarker(std::string_view s) {
  for (std::string_view m : {kSpawnOpen, kSpawnClose, kJoinOpen, kJoinClose}) {
    if (s.find(m) != std::string_view::npos) return true;
  }
  return false;
}

struct ExprParser {
  std::string_view rest;
  Solution out;

  // Term := number | '(' Expr ')'
  std::optional<Value> Term() {
    SkipSpaces(rest);
    if (TakeLiteral(rest, "(")) {
      auto v = Expr();
      SkipSpaces(rest);
      if (!v || !TakeLiteral(rest, ")")) return std::nullopt;
      return v;
    }
    auto v = TakeNumber(rest);
    if (!v || *v < 1) return std::nullopt;
    return v;
  }

  // Expr := Term [op Term]
  std::optional<Value> Expr() {
    auto left = Term();
    if (!left) return std::nullopt;
    SkipSpaces(rest);
    std::string_view probe = rest;
    auto op = TakeOperator(probe);
    if (!op) return left;
    rest = probe;
    auto right = Term();
    if (!right) return std::nullopt;
    auto made = MakeOp(*op, *left, *right);
    if (!made) return std::nullopt;
    out.ops.push_back(*made);
    return made->result;
  }
};

}  // namespace

std::size_t CountTokens(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (const std::size_t p = PunctuationLength(text, i); p != 0) {
      ++count;
      in_word = false;
      i += p;
    } else if (IsSpace(text[i])) {
      in_word = false;
      ++i;
    } else {
      if (!in_word) ++count;
      in_word = true;
      ++i;
    }
  }
  return count;
}

std::string_view OperatorSymbol(Operator op) {
  switch (op) {
    case Operator::kAdd: return "+";
    case Operator::kSub: return kMinus;
    case Operator::kMul: return kTimes;
    case Operator::kDiv: return kDivide;
  }
  return "?";
}

std::string RenderOp(const ArithOp& op) {
  std::string s = std::to_string(op.left);
  s += OperatorSymbol(op.op);
  s += std::to_string(op.right);
  s += '=';
  s += std::to_string(op.result);
  return s;
}

std::string RenderOps(const std::vector<ArithOp>& ops) {
  std::string s = "[";
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) s += ", ";
    s += RenderOp(ops[i]);
  }
  s += ']';
  return s;
}

std::string RenderState(const SearchState& state) {
  std::string s(kStatePrefix);
  s += std::to_string(state.target);
  s += ":[";
  for (std::size_t i = 0; i < state.remaining.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(state.remaining[i]);
  }
  s += ']';
  s += kOpsLabel;
  s += RenderOps(state.path);
  return s;
}

std::string RenderExplore(const ArithOp& op) {
  return std::string(kExplorePrefix) + RenderOp(op);
}

std::string RenderSpawn(const std::vector<std::string>& messages) {
  std::string s(kSpawnOpen);
  s += " [ ";
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i) {
      s += ' ';
      s += kMessageSeparator;
      s += ' ';
    }
    s += EscapePayload(messages[i]);
  }
  s += " ] ";
  s += kSpawnClose;
  return s;
}

std::string RenderJoin(const std::optional<std::string>& message) {
  std::string s(kJoinOpen);
  s += ' ';
  s += message ? EscapePayload(*message) : std::string(kFailSentinel);
  s += ' ';
  s += kJoinClose;
  return s;
}

std::string RenderSolutionMessage(const std::vector<ArithOp>& ops) {
  return std::string(kMessagePrefix) + RenderOps(ops);
}

std::string RenderExpression(const Task& task, const Solution& sol) {
  struct Entry {
    Value value;
    std::string expr;
    bool leaf;
  };
  std::vector<Entry> pool;
  for (Value v : task.inputs) pool.push_back({v, std::to_string(v), true});
  auto take = [&](Value v) -> Entry {
    // Most recent entry first so that results feed the op that follows them.
    for (auto it = pool.rbegin(); it != pool.rend(); ++it) {
      if (it->value == v) {
        Entry e = std::move(*it);
        pool.erase(std::next(it).base());
        return e;
      }
    }
    throw std::invalid_argument("solution uses an unavailable number");
  };
  auto wrap = [](const Entry& e) {
    return e.leaf ? e.expr : "(" + e.expr + ")";
  };
  for (const ArithOp& op : sol.ops) {
    Entry l = take(op.left);
    Entry r = take(op.right);
    pool.push_back({op.result,
                    wrap(l) + std::string(OperatorSymbol(op.op)) + wrap(r),
                    false});
  }
  if (pool.size() != 1) {
    throw std::invalid_argument("solution does not consume every input");
  }
  return pool[0].expr;
}

std::string RenderAnswer(const Task& task, const Solution& sol) {
  return std::string(kAnswerPrefix) + " " + RenderExpression(task, sol) +
         " = " + std::to_string(task.target);
}

std::optional<ArithOp> ParseOp(std::string_view text) {
  text = Trim(text);
  auto left = TakeNumber(text);
  if (!left || *left < 1) return std::nullopt;
  auto op = TakeOperator(text);
  if (!op) return std::nullopt;
  auto right = TakeNumber(text);
  if (!right || !TakeLiteral(text, "=")) return std::nullopt;
  auto result = TakeNumber(text);
  if (!result || !text.empty()) return std::nullopt;
  auto made = MakeOp(*op, *left, *right);
  if (!made || made->result != *result) return std::nullopt;
  return made;
}

std::optional<std::vector<ArithOp>> ParseOps(std::string_view text) {
  text = Trim(text);
  if (!TakeLiteral(text, "[") || !text.ends_with("]")) return std::nullopt;
  text.remove_suffix(1);
  std::vector<ArithOp> ops;
  if (Trim(text).empty()) return ops;
  for (std::string_view part : Split(text, ",")) {
    auto op = ParseOp(part);
    if (!op) return std::nullopt;
    ops.push_back(*op);
  }
  return ops;
}

std::optional<SearchState> ParseState(std::string_view text) {
  text = Trim(text);
  if (!TakeLiteral(text, kStatePrefix)) return std::nullopt;
  SearchState s;
  auto target = TakeNumber(text);
  if (!target || *target < 1 || !TakeLiteral(text, ":[")) return std::nullopt;
  s.target = *target;
  while (!TakeLiteral(text, "]")) {
    if (!s.remaining.empty() && !TakeLiteral(text, ",")) return std::nullopt;
    auto v = TakeNumber(text);
    if (!v || *v < 1) return std::nullopt;
    s.remaining.push_back(*v);
  }
  if (s.remaining.empty() || !TakeLiteral(text, kOpsLabel)) return std::nullopt;
  auto ops = ParseOps(text);
  if (!ops) return std::nullopt;
  s.path = std::move(*ops);
  std::sort(s.remaining.begin(), s.remaining.end());
  return s;
}

std::optional<std::vector<ArithOp>> ParseSolutionMessage(std::string_view text) {
  text = Trim(text);
  if (!TakeLiteral(text, kMessagePrefix)) return std::nullopt;
  return ParseOps(text);
}

std::optional<Solution> ParseExpression(std::string_view text) {
  ExprParser p{text, {}};
  auto v = p.Expr();
  SkipSpaces(p.rest);
  if (!v || !p.rest.empty()) return std::nullopt;
  return std::move(p.out);
}

std::optional<ParsedAnswer> ParseAnswer(std::string_view line) {
  line = Trim(line);
  if (!TakeLiteral(line, kAnswerPrefix)) return std::nullopt;
  const std::size_t eq = line.rfind('=');
  if (eq == std::string_view::npos) return std::nullopt;
  std::string_view rhs = Trim(line.substr(eq + 1));
  auto target = TakeNumber(rhs);
  if (!target || !rhs.empty()) return std::nullopt;
  auto sol = ParseExpression(line.substr(0, eq));
  if (!sol) return std::nullopt;
  return ParsedAnswer{std::move(*sol), *target};
}

std::string EscapePayload(std::string_view payload) {
  std::string out;
  out.reserve(payload.size());
  for (char c : payload) {
    switch (c) {
      case '\\': out += "\\u005c"; break;
      case '<': out += "\\u003c"; break;
      case '|': out += "\\u007c"; break;
      case '\n': out += "\\u000a"; break;
      default: out += c;
    }
  }
  return out;
}

std::string UnescapePayload(std::string_view payload) {
  std::string out;
  out.reserve(payload.size());
  for (std::size_t i = 0; i < payload.size(); ++i) {
    const std::string_view rest = payload.substr(i);
    if (rest.starts_with("\\u005c")) {
      out += '\\';
    } else if (rest.starts_with("\\u003c")) {
      out += '<';
    } else if (rest.starts_with("\\u007c")) {
      out += '|';
    } else if (rest.starts_with("\\u000a")) {
      out += '\n';
    } else {
      out += payload[i];
      continue;
    }
    i += 5;
  }
  return out;
}

ParsedLine ParseLine(std::string_view line) {
  if (line.starts_with(kSpawnOpen)) {
    std::string_view body = line;
    if (!TakeLiteral(body, kSpawnOpen) || !TakeLiteral(body, " [ ") ||
        !body.ends_with(" ] " + std::string(kSpawnClose))) {
      return MalformedLine{"unterminated spawn marker"};
    }
    body.remove_suffix(3 + kSpawnClose.size());
    if (ContainsMarker(body)) return MalformedLine{"nested marker in spawn"};
    SpawnLine spawn;
    for (std::string_view msg : Split(body, " || ")) {
      if (Trim(msg).empty()) return MalformedLine{"empty spawn message"};
      spawn.messages.push_back(UnescapePayload(msg));
    }
    return spawn;
  }
  if (line.starts_with(kJoinOpen)) {
    std::string_view body = line;
    TakeLiteral(body, kJoinOpen);
    if (!body.ends_with(kJoinClose)) return MalformedLine{"unterminated join"};
    body.remove_suffix(kJoinClose.size());
    if (ContainsMarker(body)) return MalformedLine{"nested marker in join"};
    body = Trim(body);
    if (body == kFailSentinel) return JoinLine{std::nullopt};
    return JoinLine{UnescapePayload(body)};
  }
  if (ContainsMarker(line)) return MalformedLine{"marker inside a plain line"};
  if (Trim(line).starts_with(kAnswerPrefix)) {
    auto parsed = ParseAnswer(line);
    if (!parsed) return MalformedLine{"unparseable answer"};
    return AnswerLine{std::move(parsed->solution)};
  }
  return PlainLine{std::string(line)};
}

std::string ThreadString(const ThreadText& thread) {
  if (thread.generated.empty()) return thread.context;
  return thread.context + "\n" + thread.generated;
}

TokenCount CountTraceTokens(const TraceText& text) {
  TokenCount tc;
  for (const ThreadText& t : text.threads) {
    const std::size_t n = CountTokens(ThreadString(t));
    tc.per_thread.push_back(n);
    tc.total += n;
  }
  return tc;
}

TraceText Encode(const Trace& trace) {
  CheckWellFormed(trace);
  TraceText out;
  out.status = trace.status();
  for (const ThreadRecord& t : trace.threads) {
    ThreadText tt{t.id, t.parent, t.context, {}};
    bool first = true;
    for (const ThreadEvent& ev : t.events) {
      if (!first) tt.generated += '\n';
      first = false;
      if (const auto* step = std::get_if<StepEvent>(&ev)) {
        tt.generated += step->text;
      } else if (const auto* spawn = std::get_if<SpawnEvent>(&ev)) {
        tt.generated += RenderSpawn(spawn->messages);
      } else {
        tt.generated += RenderJoin(std::get<JoinEvent>(ev).message);
      }
    }
    out.threads.push_back(std::move(tt));
  }
  return out;
}

Trace Decode(const TraceText& text, double per_token_ms) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("cannot decode trace: " + why);
  };
  Trace trace;
  const std::size_t n = text.threads.size();
  if (n == 0) fail("no threads");
  // Children of each thread in id order, consumed by its spawns.
  std::vector<std::vector<ThreadId>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ThreadText& tt = text.threads[i];
    if (ToIndex(tt.id) != i) fail("thread ids must equal their index");
    if (tt.parent) {
      if (ToIndex(*tt.parent) >= i) fail("parent must precede child");
      children[ToIndex(*tt.parent)].push_back(tt.id);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ThreadText& tt = text.threads[i];
    ThreadRecord rec;
    rec.id = tt.id;
    rec.parent = tt.parent;
    rec.context = tt.context;
    rec.context_tokens = CountTokens(tt.context);
    rec.end = i == 0 ? text.status : ThreadEnd::kFailed;
    std::size_t next_child = 0;
    std::size_t pending_joins = 0;
    bool terminated = false;
    const auto lines =
        tt.generated.empty() ? std::vector<std::string_view>{}
                             : Split(tt.generated, "\n");
    for (std::string_view line : lines) {
      if (terminated) fail("events after a child's join");
      const std::size_t tokens = CountTokens(line);
      ParsedLine parsed = ParseLine(line);
      if (const auto* bad = std::get_if<MalformedLine>(&parsed)) {
        fail(bad->reason);
      }
      if (auto* join = std::get_if<JoinLine>(&parsed)) {
        if (pending_joins > 0) {
          --pending_joins;
          rec.context_tokens += tokens;
        } else if (i > 0) {
          rec.generated_tokens += tokens;
          rec.end = join->message ? ThreadEnd::kJoined : ThreadEnd::kFailed;
          terminated = true;
        } else {
          fail("root join without spawn");
        }
        rec.events.push_back(JoinEvent{std::move(join->message)});
        continue;
      }
      if (pending_joins > 0) fail("missing joins after spawn");
      rec.generated_tokens += tokens;
      if (auto* spawn = std::get_if<SpawnLine>(&parsed)) {
        SpawnEvent ev;
        for (std::size_t m = 0; m < spawn->messages.size(); ++m) {
          if (next_child >= children[i].size()) fail("spawn without children");
          ev.child_ids.push_back(children[i][next_child++]);
        }
        ev.messages = std::move(spawn->messages);
        pending_joins = ev.child_ids.size();
        rec.events.push_back(std::move(ev));
      } else if (auto* answer = std::get_if<AnswerLine>(&parsed)) {
        if (i == 0 && !trace.answer) trace.answer = std::move(answer->solution);
        rec.events.push_back(StepEvent{std::string(line)});
      } else {
        rec.events.push_back(StepEvent{std::get<PlainLine>(parsed).text});
      }
    }
    if (pending_joins > 0) fail("missing joins after spawn");
    if (next_child != children[i].size()) fail("child never spawned");
    if (i > 0 && !terminated) fail("child does not end with a join");
    trace.thread_ms.push_back(static_cast<double>(rec.generated_tokens) *
                              per_token_ms);
    trace.threads.push_back(std::move(rec));
  }
  return trace;
}

ConditionTag LengthBinTag(std::size_t total_tokens) {
  const std::size_t bins =
      std::max<std::size_t>(1, (total_tokens + kLengthBinTokens - 1) /
                                   kLengthBinTokens);
  return {ConditionKind::kLengthBin, bins * kLengthBinTokens};
}

ConditionTag ChildCountTag(std::size_t children) {
  if (children > 10) throw std::invalid_argument("child_count must be <= 10");
  return {ConditionKind::kChildCount, children};
}

std::string_view ToString(ConditionKind kind) {
  return kind == ConditionKind::kLengthBin ? "length_bin" : "child_count";
}

}  // namespace apr
