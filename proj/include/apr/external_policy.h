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

// Adapter that lets a completion server act as a runtime Policy.
//
// Wire format: POST {"context": string, "max_tokens": integer} and expect
// {"completion": string}. The completion is split into lines and each line is
// read with the trace grammar, so spawn and join markers come straight from
// the model's text.

#ifndef APR_EXTERNAL_POLICY_H_
#define APR_EXTERNAL_POLICY_H_

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "apr/runtime.h"

namespace apr {

// Returns the completion, or nullopt on transport failure.
using CompletionTransport = std::function<std::optional<std::string>(
    std::string_view context, std::size_t max_tokens)>;

struct EndpointConfig {
  std::string host = "127.0.0.1";
  int port = 8000;
  std::string path = "/complete";
  std::chrono::milliseconds timeout{30'000};
};

// Blocking HTTP client for the wire format above. Safe to call from several
// threads at once.
CompletionTransport HttpTransport(EndpointConfig config);

std::string CompletionRequestJson(std::string_view context,
                                  std::size_t max_tokens);
// nullopt when the body is not {"completion": string}.
std::optional<std::string> CompletionFromResponseJson(std::string_view body);

class ExternalPolicy : public Policy {
 public:
  explicit ExternalPolicy(CompletionTransport transport)
      : transport_(std::move(transport)) {}

  std::unique_ptr<PolicyThread> Open(ThreadRole role,
                                     std::string_view prefix) const override;

 private:
  CompletionTransport transport_;
};

}  // namespace apr

#endif  // APR_EXTERNAL_POLICY_H_
