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

#include <deque>
#include <utility>

#include "apr/codec.h"
#include "httplib.h"
#include "json.hpp"

namespace apr {
namespace {

using nlohmann::json;

class ExternalThread : public PolicyThread {
 public:
  explicit ExternalThread(const CompletionTransport* transport)
      : transport_(transport) {}

  Action Next(const ThreadView& view) override {
    if (pending_.empty()) Refill(view);
    if (pending_.empty()) return GiveUpAction{};
    Action next = std::move(pending_.front());
    pending_.pop_front();
    return next;
  }

 private:
  void Refill(const ThreadView& view) {
    const std::size_t room =
        view.token_cap > view.tokens_used ? view.token_cap - view.tokens_used : 0;
    std::optional<std::string> completion = (*transport_)(view.context, room);
    if (!completion) {
      pending_.push_back(FaultAction{"transport failure"});
      return;
    }
    std::string_view rest = *completion;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
      if (!Queue(line)) return;
    }
  }

  // False once a line ends the completion's usable prefix.
  bool Queue(std::string_view line) {
    ParsedLine parsed = ParseLine(line);
    if (auto* bad = std::get_if<MalformedLine>(&parsed)) {
      pending_.push_back(FaultAction{"malformed completion line: " + bad->reason});
      return false;
    }
    if (auto* spawn = std::get_if<SpawnLine>(&parsed)) {
      pending_.push_back(SpawnAction{std::move(spawn->messages)});
      // Later lines depend on what the children return.
      return false;
    }
    if (auto* join = std::get_if<JoinLine>(&parsed)) {
      pending_.push_back(JoinAction{std::move(join->message)});
      return false;
    }
    if (auto* answer = std::get_if<AnswerLine>(&parsed)) {
      pending_.push_back(AnswerAction{std::move(answer->solution), std::string(line)});
      return false;
    }
    pending_.push_back(EmitAction{std::move(std::get<PlainLine>(parsed).text)});
    return true;
  }

  const CompletionTransport* transport_;
  std::deque<Action> pending_;
};

}  // namespace

std::string CompletionRequestJson(std::string_view context,
                                  std::size_t max_tokens) {
  json body = {{"context", std::string(context)}, {"max_tokens", max_tokens}};
  return body.dump();
}

std::optional<std::string> CompletionFromResponseJson(std::string_view body) {
  json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_object()) return std::nullopt;
  auto it = parsed.find("completion");
  if (it == parsed.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

CompletionTransport HttpTransport(EndpointConfig config) {
  return [config = std::move(config)](std::string_view context,
                                      std::size_t max_tokens)
             -> std::optional<std::string> {
    httplib::Client client(config.host, config.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        config.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(config.path, CompletionRequestJson(context, max_tokens),
                           "application/json");
    if (!res || res->status != 200) return std::nullopt;
    return CompletionFromResponseJson(res->body);
  };
}

std::unique_ptr<PolicyThread> ExternalPolicy::Open(ThreadRole,
                                                   std::string_view) const {
  return std::make_unique<ExternalThread>(&transport_);
}

}  // namespace apr
