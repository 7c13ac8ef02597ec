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


#include "apr/external_policy.h"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "apr/codec.h"
#include "apr/solvers.h"

namespace apr {
namespace {

const Task kTask{{1, 4, 6, 8}, 10};

// Plays back an encoded trace: the thread whose text starts with the context
// supplies the rest of its lines. The line a root could not fit is not in the
// text, so an oversized one stands in for it.
CompletionTransport ReplayTransport(const TraceText& text) {
  std::vector<std::string> full;
  for (const ThreadText& t : text.threads) full.push_back(ThreadString(t));
  if (text.status == ThreadEnd::kBudgetExhausted) {
    full[0] += "\nw";
    for (std::size_t i = 0; i < BudgetConfig{}.context_cap_tokens; ++i) full[0] += " w";
  }
  return [full](std::string_view context, std::size_t) -> std::optional<std::string> {
    for (const std::string& f : full) {
      if (f.starts_with(context)) return f.substr(context.size());
    }
    return std::string();
  };
}

std::string Dump(const Trace& trace) {
  const TraceText text = Encode(trace);
  std::string out(ToString(text.status));
  for (const ThreadText& t : text.threads) out += "\n--\n" + ThreadString(t);
  return out;
}

CompletionTransport Constant(std::optional<std::string> completion) {
  return [completion](std::string_view, std::size_t) { return completion; };
}

TEST(ExternalPolicyTest, ReplayReproducesSolverTraces) {
  SampleOptions opts;
  opts.n = 60;
  opts.seed = 8;
  std::size_t spawns = 0;
  for (const Task& task : SampleTasks(opts)) {
    ExpansionConfig cfg;
    cfg.beam_k = 10;
    BudgetConfig budget;
    budget.enforce_child_count = 3;
    const SolveOutcome symbolic = SolveApr(task, cfg, budget);
    const Trace replay =
        ThreadRuntime().Run(ExternalPolicy(ReplayTransport(Encode(*symbolic.trace))),
                            task, budget);
    ASSERT_EQ(Dump(replay), Dump(*symbolic.trace));
    EXPECT_EQ(replay.threads, symbolic.trace->threads);
    EXPECT_EQ(replay.answer, symbolic.trace->answer);
    spawns += SpawnCount(replay);
  }
  EXPECT_GT(spawns, 0u);
}

TEST(ExternalPolicyTest, NoTerminatorExhaustsBudget) {
  BudgetConfig budget;
  budget.context_cap_tokens = 200;
  const Trace trace = ThreadRuntime().Run(
      ExternalPolicy(Constant("Exploring Operation: 8−6=2\nExploring Operation: 4+1=5")),
      kTask, budget);
  const SolveOutcome out = OutcomeFromTrace(kTask, trace);
  EXPECT_EQ(out.status, SolveStatus::kBudgetExhausted);
  EXPECT_LE(trace.root().length_tokens(), 200u);
}

TEST(ExternalPolicyTest, MalformedSpawnIsAProtocolError) {
  const Trace trace = ThreadRuntime().Run(
      ExternalPolicy(Constant("Exploring Operation: 8−6=2\n<SPAWN> [ Current State")),
      kTask, {});
  EXPECT_EQ(OutcomeFromTrace(kTask, trace).status, SolveStatus::kProtocolError);
  ASSERT_EQ(trace.root().events.size(), 1u);
}

TEST(ExternalPolicyTest, TransportFailureIsAProtocolError) {
  const Trace trace = ThreadRuntime().Run(ExternalPolicy(Constant(std::nullopt)), kTask, {});
  EXPECT_EQ(trace.status(), ThreadEnd::kProtocolError);
}

TEST(ExternalPolicyTest, EmptyCompletionGivesUp) {
  const Trace trace = ThreadRuntime().Run(ExternalPolicy(Constant("")), kTask, {});
  EXPECT_EQ(OutcomeFromTrace(kTask, trace).status, SolveStatus::kNoResult);
}

TEST(ExternalPolicyTest, WrongAnswerIsNoResult) {
  const Trace trace =
      ThreadRuntime().Run(ExternalPolicy(Constant("Answer: 8+4 = 12")), kTask, {});
  EXPECT_EQ(OutcomeFromTrace(kTask, trace).status, SolveStatus::kNoResult);
}

TEST(WireFormatTest, RequestAndResponse) {
  const auto req = nlohmann::json::parse(CompletionRequestJson("ctx\nline", 42));
  EXPECT_EQ(req["context"], "ctx\nline");
  EXPECT_EQ(req["max_tokens"], 42);
  EXPECT_EQ(CompletionFromResponseJson(R"({"completion":"a\nb"})"), "a\nb");
  EXPECT_FALSE(CompletionFromResponseJson("not json").has_value());
  EXPECT_FALSE(CompletionFromResponseJson(R"({"completion":3})").has_value());
  EXPECT_FALSE(CompletionFromResponseJson("[]").has_value());
}

TEST(HttpTransportTest, SolvesThroughLocalServer) {
  httplib::Server server;
  std::size_t last_max_tokens = 0;
  server.Post("/complete", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    last_max_tokens = body["max_tokens"].get<std::size_t>();
    nlohmann::json out = {{"completion", "Exploring Operation: 8−6=2\nAnswer: (8−6)×(4+1) = 10"}};
    res.set_content(out.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  EndpointConfig endpoint;
  endpoint.port = port;
  const Trace trace = ThreadRuntime().Run(ExternalPolicy(HttpTransport(endpoint)), kTask, {});
  const SolveOutcome out = OutcomeFromTrace(kTask, trace);
  EXPECT_EQ(out.status, SolveStatus::kGoalReached);
  EXPECT_EQ(last_max_tokens, 4096 - trace.root().context_tokens);

  endpoint.path = "/missing";
  const Trace missing = ThreadRuntime().Run(ExternalPolicy(HttpTransport(endpoint)), kTask, {});
  EXPECT_EQ(missing.status(), ThreadEnd::kProtocolError);

  server.stop();
  listener.join();
}

}  // namespace
}  // namespace apr
