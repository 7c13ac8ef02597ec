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

#include <gtest/gtest.h>

#include <algorithm>

#include "apr/solvers.h"

namespace apr {
namespace {

// Independent counter: pad every punctuation mark with spaces and split.
std::size_t ReferenceCount(std::string_view text) {
  static const std::vector<std::string> kMarks = {
      "(", ")", "[", "]", ",", ":", "=", "+", "−", "×", "÷", "<", ">", "/"};
  std::string padded;
  for (std::size_t i = 0; i < text.size();) {
    bool hit = false;
    for (const auto& m : kMarks) {
      if (text.substr(i).starts_with(m)) {
        padded += " " + m + " ";
        i += m.size();
        hit = true;
        break;
      }
    }
    if (!hit) padded += text[i++];
  }
  std::size_t n = 0;
  bool in_word = false;
  for (char c : padded) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r' ||
                       c == '\v' || c == '\f';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

TEST(CountTokensTest, Examples) {
  EXPECT_EQ(CountTokens(""), 0u);
  EXPECT_EQ(CountTokens("2+3=5"), 5u);
  EXPECT_EQ(CountTokens("<JOIN> FAIL </JOIN>"), 8u);
  EXPECT_EQ(CountTokens("Current State: 27:[22,26]"), 10u);
}

TEST(CountTokensTest, AgreesWithReferenceAndIsAdditiveOverLines) {
  const std::vector<std::string> lines = {
      "Current State: 27:[22,26,31,53], Operations: []",
      "Exploring Operation: 53−26=27",
      "<SPAWN> [ Current State: 4:[2,2], Operations: [] ] </SPAWN>",
      "<JOIN> Operations: [8÷2=4] </JOIN>",
      "Answer: (8−6)×(4+1) = 10",
  };
  std::string joined;
  std::size_t sum = 0;
  for (const auto& l : lines) {
    EXPECT_EQ(CountTokens(l), ReferenceCount(l)) << l;
    sum += CountTokens(l);
    joined += l + "\n";
  }
  EXPECT_EQ(CountTokens(joined), sum);
}

TEST(RenderTest, LinesFollowTheGrammar) {
  const ArithOp op{53, 26, Operator::kSub, 27};
  EXPECT_EQ(RenderOp(op), "53−26=27");
  EXPECT_EQ(RenderExplore(op), "Exploring Operation: 53−26=27");
  EXPECT_EQ(RenderState(SearchState{{22, 26, 31, 53}, 27, {}}),
            "Current State: 27:[22,26,31,53], Operations: []");
  EXPECT_EQ(RenderJoin(std::nullopt), "<JOIN> FAIL </JOIN>");
  EXPECT_EQ(RenderSpawn({"a", "b"}), "<SPAWN> [ a || b ] </SPAWN>");
  const Task task{{1, 4, 6, 8}, 10};
  const Solution sol{{{8, 6, Operator::kSub, 2}, {4, 1, Operator::kAdd, 5},
                      {2, 5, Operator::kMul, 10}}};
  EXPECT_EQ(RenderAnswer(task, sol), "Answer: (8−6)×(4+1) = 10");
}

TEST(ParseTest, StateRoundTrip) {
  SearchState s{{3, 5, 9}, 24, {{4, 1, Operator::kSub, 3}}};
  auto parsed = ParseState(RenderState(s));
  ASSERT_TRUE(parsed.has_value());
  EXPECT_EQ(*parsed, s);
  EXPECT_FALSE(ParseState("Current State: 24:[3,5").has_value());
}

TEST(ParseTest, AnswerRoundTrip) {
  const Task task{{1, 4, 6, 8}, 10};
  const Solution sol{{{8, 6, Operator::kSub, 2}, {4, 1, Operator::kAdd, 5},
                      {2, 5, Operator::kMul, 10}}};
  auto parsed = ParseAnswer(RenderAnswer(task, sol));
  ASSERT_TRUE(parsed.has_value());
  EXPECT_EQ(parsed->target, 10);
  EXPECT_TRUE(ValidateSolution(task, parsed->solution));
  EXPECT_FALSE(ParseAnswer("Answer: (8−6 = 10").has_value());
}

TEST(ParseLineTest, Classifies) {
  EXPECT_TRUE(std::holds_alternative<PlainLine>(ParseLine("Exploring Operation: 2+2=4")));
  auto spawn = ParseLine("<SPAWN> [ a || b ] </SPAWN>");
  ASSERT_TRUE(std::holds_alternative<SpawnLine>(spawn));
  EXPECT_EQ(std::get<SpawnLine>(spawn).messages, (std::vector<std::string>{"a", "b"}));
  auto fail = ParseLine("<JOIN> FAIL </JOIN>");
  ASSERT_TRUE(std::holds_alternative<JoinLine>(fail));
  EXPECT_FALSE(std::get<JoinLine>(fail).message.has_value());
  EXPECT_TRUE(std::holds_alternative<AnswerLine>(ParseLine("Answer: 7 = 7")));
  EXPECT_TRUE(std::holds_alternative<MalformedLine>(ParseLine("<SPAWN> [ a ")));
  EXPECT_TRUE(std::holds_alternative<MalformedLine>(ParseLine("<JOIN> x")));
  EXPECT_TRUE(std::holds_alternative<MalformedLine>(ParseLine("<SPAWN> [ a ||  ] </SPAWN>")));
  EXPECT_TRUE(std::holds_alternative<MalformedLine>(ParseLine("text <JOIN> more")));
  EXPECT_TRUE(std::holds_alternative<MalformedLine>(ParseLine("Answer: (1+")));
}

TEST(EscapeTest, RoundTripsAndHidesMarkers) {
  for (std::string s : {"", "plain", "<JOIN> a || b </SPAWN>", "\\u003c", "x\ny|z\\"}) {
    const std::string e = EscapePayload(s);
    EXPECT_EQ(e.find('<'), std::string::npos);
    EXPECT_EQ(e.find('|'), std::string::npos);
    EXPECT_EQ(e.find('\n'), std::string::npos);
    EXPECT_EQ(UnescapePayload(e), s);
  }
  auto parsed = ParseLine(RenderSpawn({"<JOIN>", "a||b"}));
  ASSERT_TRUE(std::holds_alternative<SpawnLine>(parsed));
  EXPECT_EQ(std::get<SpawnLine>(parsed).messages,
            (std::vector<std::string>{"<JOIN>", "a||b"}));
}

TEST(EncodeTest, SolvedStartStateHasAnswerAndNoSpawn) {
  const Task task{{10}, 10};
  SolveOutcome out = SolveApr(task, ExpansionConfig{}, BudgetConfig{});
  ASSERT_EQ(out.status, SolveStatus::kGoalReached);
  const TraceText text = Encode(*out.trace);
  ASSERT_EQ(text.threads.size(), 1u);
  EXPECT_EQ(text.threads[0].generated.find(kSpawnOpen), std::string::npos);
  EXPECT_NE(text.threads[0].generated.find("Answer: 10 = 10"), std::string::npos);
}

TEST(EncodeTest, OneSpawnStructure) {
  Trace t;
  ThreadRecord root;
  root.id = kRootThread;
  root.context = "Current State: 4:[2,2], Operations: []";
  root.events = {SpawnEvent{{ThreadId{1}}, {"Current State: 4:[4], Operations: [2+2=4]"}},
                 JoinEvent{"Operations: [2+2=4]"},
                 StepEvent{"Answer: 2+2 = 4"}};
  root.end = ThreadEnd::kAnswered;
  ThreadRecord child;
  child.id = ThreadId{1};
  child.parent = kRootThread;
  child.context = "Current State: 4:[4], Operations: [2+2=4]";
  child.events = {JoinEvent{"Operations: [2+2=4]"}};
  child.end = ThreadEnd::kJoined;
  t.threads = {root, child};
  const TraceText text = Encode(t);
  ASSERT_EQ(text.threads.size(), 2u);
  EXPECT_EQ(text.threads[0].generated,
            "<SPAWN> [ Current State: 4:[4], Operations: [2+2=4] ] </SPAWN>\n"
            "<JOIN> Operations: [2+2=4] </JOIN>\n"
            "Answer: 2+2 = 4");
  EXPECT_EQ(text.threads[1].parent, kRootThread);
  EXPECT_EQ(text.threads[1].generated, "<JOIN> Operations: [2+2=4] </JOIN>");
  const Trace back = Decode(text);
  EXPECT_EQ(back.threads[0].events, root.events);
  EXPECT_EQ(back.threads[1].end, ThreadEnd::kJoined);
  // The joined line is context for the parent, generation for the child.
  const std::size_t join_tokens = CountTokens("<JOIN> Operations: [2+2=4] </JOIN>");
  EXPECT_EQ(back.threads[0].context_tokens, CountTokens(root.context) + join_tokens);
  EXPECT_EQ(back.threads[1].generated_tokens, join_tokens);
}

TEST(EncodeTest, TwoChildSpawnHasOneSpawnAndTwoJoins) {
  const Task task{{2, 2}, 4};
  ScriptedPolicy policy({SpawnAction{{"a", "b"}}, AnswerAction{Solution{{{2, 2, Operator::kAdd, 4}}}, ""}},
                        {{"a", {JoinAction{"x"}}}, {"b", {}}});
  const TraceText text = Encode(ThreadRuntime().Run(policy, task, {}));
  const std::string& parent = text.threads[0].generated;
  auto count = [&](std::string_view needle) {
    std::size_t n = 0;
    for (auto p = parent.find(needle); p != std::string::npos; p = parent.find(needle, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count(kSpawnOpen), 1u);
  EXPECT_EQ(count(kJoinOpen), 2u);
  EXPECT_NE(parent.find("<JOIN> FAIL </JOIN>"), std::string::npos);
}

TEST(EncodeTest, RejectsIllFormedTraces) {
  Trace t;
  ThreadRecord root;
  root.events = {JoinEvent{"x"}};
  t.threads = {root};
  EXPECT_THROW(Encode(t), std::invalid_argument);
  EXPECT_THROW(Encode(Trace{}), std::invalid_argument);
}

TEST(DecodeTest, RejectsGrammarViolations) {
  TraceText text;
  text.threads = {ThreadText{kRootThread, std::nullopt, "ctx", "<SPAWN> [ a ] </SPAWN>"}};
  EXPECT_THROW(Decode(text), std::invalid_argument);
  text.threads = {ThreadText{kRootThread, std::nullopt, "ctx", "<JOIN> a </JOIN>"}};
  EXPECT_THROW(Decode(text), std::invalid_argument);
  text.threads = {ThreadText{kRootThread, std::nullopt, "ctx", ""},
                  ThreadText{ThreadId{1}, kRootThread, "m", "<JOIN> a </JOIN>"}};
  EXPECT_THROW(Decode(text), std::invalid_argument);
}

TEST(RoundTripTest, SolverTracesSurviveEncodeDecode) {
  SampleOptions opts;
  opts.n = 500;
  opts.seed = 31;
  const auto tasks = SampleTasks(opts);
  ExpansionConfig cfg;
  cfg.beam_k = 10;
  std::size_t spawned = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    cfg.rng_seed = i;
    BudgetConfig budget;
    budget.context_cap_tokens = 2048;
    for (int mode = 0; mode < 2; ++mode) {
      const SolveOutcome out = mode == 0 ? SolveSosPlus(tasks[i], cfg, budget)
                                         : SolveApr(tasks[i], cfg, budget);
      const Trace& orig = *out.trace;
      const TraceText text = Encode(orig);
      const Trace back = Decode(text);
      ASSERT_EQ(back.threads, orig.threads) << i;
      EXPECT_EQ(back.answer, orig.answer);
      EXPECT_EQ(Encode(back), text);
      const TokenCount tc = CountTraceTokens(text);
      for (std::size_t k = 0; k < orig.threads.size(); ++k) {
        EXPECT_EQ(tc.per_thread[k], orig.threads[k].length_tokens());
      }
      spawned += SpawnCount(orig);
    }
  }
  EXPECT_GT(spawned, 0u);
}

TEST(ConditionTagTest, LengthBins) {
  EXPECT_EQ(LengthBinTag(700).value, 1024u);
  EXPECT_EQ(LengthBinTag(512).value, 512u);
  EXPECT_EQ(LengthBinTag(513).value, 1024u);
  EXPECT_EQ(LengthBinTag(1).value, 512u);
  EXPECT_EQ(LengthBinTag(0).value, 512u);
  for (std::size_t n = 1; n < 5000; n += 7) {
    const auto v = LengthBinTag(n).value;
    EXPECT_EQ(v % 512, 0u);
    EXPECT_GE(v, n);
    EXPECT_LT(v - n, 512u);
  }
}

TEST(ConditionTagTest, ChildCount) {
  EXPECT_EQ(ChildCountTag(0), (ConditionTag{ConditionKind::kChildCount, 0}));
  EXPECT_EQ(ChildCountTag(10).value, 10u);
  EXPECT_THROW(ChildCountTag(11), std::invalid_argument);
  EXPECT_EQ(ToString(ConditionKind::kLengthBin), "length_bin");
}

}  // namespace
}  // namespace apr
