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

#include "apr/runtime.h"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <utility>

#include "apr/codec.h"
#include "apr/search.h"

namespace apr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct ChildResult {
  ThreadRecord record;
  std::vector<std::string> diagnostics;
};

// Runs one thread to completion. Only the root is given a spawner.
class ThreadDriver {
 public:
  using Spawner = std::function<std::vector<ChildResult>(
      const std::vector<std::string>& messages, ThreadId first_id)>;

  ThreadDriver(const Policy& policy, ThreadRole role, ThreadId id,
               std::optional<ThreadId> parent, std::string prefix,
               const Task* task, const BudgetConfig& budget)
      : policy_(policy), role_(role), task_(task), budget_(budget) {
    rec_.id = id;
    rec_.parent = parent;
    rec_.context = std::move(prefix);
    rec_.context_tokens = CountTokens(rec_.context);
    window_ = rec_.context;
    reserve_ = role == ThreadRole::kChild ? FailJoinTokens() : 0;
  }

  // Root only: children records are appended to `children`.
  void Run(const Spawner& spawner, std::vector<ThreadRecord>* children,
           std::optional<Solution>* answer) {
    auto thread = policy_.Open(role_, rec_.context);
    std::vector<std::optional<std::string>> joined;
    while (!done_) {
      ThreadView view{role_, window_, Used(), budget_.context_cap_tokens,
                      joined};
      Action action = thread->Next(view);
      joined.clear();
      std::visit(
          Overloaded{
              [&](EmitAction& a) { Emit(std::move(a.text)); },
              [&](SpawnAction& a) {
                Spawn(std::move(a.messages), spawner, children, joined);
              },
              [&](JoinAction& a) { Join(std::move(a.message)); },
              [&](AnswerAction& a) { Answer(a, answer); },
              [&](GiveUpAction&) {
                if (role_ == ThreadRole::kChild) {
                  Join(std::nullopt);
                } else {
                  Finish(ThreadEnd::kNoResult);
                }
              },
              [&](FaultAction& a) { Protocol(a.reason); },
          },
          action);
    }
  }

  ThreadRecord TakeRecord() { return std::move(rec_); }
  std::vector<std::string> TakeDiagnostics() { return std::move(notes_); }

 private:
  std::size_t Used() const { return rec_.length_tokens(); }
  bool Fits(std::size_t extra) const {
    return Used() + extra + reserve_ <= budget_.context_cap_tokens;
  }

  void Note(const std::string& what) {
    notes_.push_back("thread " + std::to_string(ToIndex(rec_.id)) + ": " + what);
  }

  void Append(const std::string& line) {
    window_ += '\n';
    window_ += line;
  }

  void Finish(ThreadEnd end) {
    rec_.end = end;
    done_ = true;
  }

  void Overflow() {
    Note("context cap reached");
    if (role_ == ThreadRole::kChild) {
      ForceFailJoin();
    } else {
      Finish(ThreadEnd::kBudgetExhausted);
    }
  }

  void Protocol(const std::string& why) {
    Note("protocol error: " + why);
    if (role_ == ThreadRole::kChild) {
      ForceFailJoin();
    } else {
      Finish(ThreadEnd::kProtocolError);
    }
  }

  // Always fits: children keep FailJoinTokens() in reserve.
  void ForceFailJoin() {
    const std::string line = RenderJoin(std::nullopt);
    rec_.generated_tokens += CountTokens(line);
    rec_.events.push_back(JoinEvent{std::nullopt});
    Append(line);
    Finish(ThreadEnd::kFailed);
  }

  void Emit(std::string text) {
    if (text.empty() || text.find('\n') != std::string::npos ||
        !std::holds_alternative<PlainLine>(ParseLine(text))) {
      Protocol("emitted text is not a plain line");
      return;
    }
    const std::size_t tokens = CountTokens(text);
    if (tokens == 0) {
      Protocol("emitted text has no tokens");
      return;
    }
    if (!Fits(tokens)) {
      Overflow();
      return;
    }
    rec_.generated_tokens += tokens;
    Append(text);
    rec_.events.push_back(StepEvent{std::move(text)});
  }

  void Spawn(std::vector<std::string> messages, const Spawner& spawner,
             std::vector<ThreadRecord>* children,
             std::vector<std::optional<std::string>>& joined) {
    if (role_ == ThreadRole::kChild || !spawner) {
      Protocol("child threads cannot spawn");
      return;
    }
    if (messages.empty()) {
      Protocol("spawn without messages");
      return;
    }
    const std::size_t spawned = children->size();
    const std::size_t room = budget_.max_child_threads > spawned
                                 ? budget_.max_child_threads - spawned
                                 : 0;
    if (room == 0) {
      Protocol("child thread budget exhausted");
      return;
    }
    if (messages.size() > room) messages.resize(room);
    for (const std::string& m : messages) {
      if (CountTokens(m) + FailJoinTokens() > budget_.context_cap_tokens) {
        Protocol("spawn message does not fit a child context");
        return;
      }
    }
    const std::string line = RenderSpawn(messages);
    const std::size_t tokens = CountTokens(line);
    if (!Fits(tokens + messages.size() * FailJoinTokens())) {
      Overflow();
      return;
    }
    rec_.generated_tokens += tokens;
    Append(line);
    const ThreadId first{static_cast<std::uint32_t>(spawned + 1)};
    SpawnEvent ev;
    for (std::size_t i = 0; i < messages.size(); ++i) {
      ev.child_ids.push_back(ThreadId{ToIndex(first) + static_cast<std::uint32_t>(i)});
    }
    ev.messages = messages;
    rec_.events.push_back(std::move(ev));

    std::vector<ChildResult> results = spawner(messages, first);
    // Join barrier: every child has terminated here.
    for (std::size_t i = 0; i < results.size(); ++i) {
      ThreadRecord& child = results[i].record;
      for (auto& n : results[i].diagnostics) notes_.push_back(std::move(n));
      std::optional<std::string> msg =
          std::get<JoinEvent>(child.events.back()).message;
      std::string join_line = RenderJoin(msg);
      std::size_t join_tokens = CountTokens(join_line);
      const std::size_t later = results.size() - i - 1;
      if (msg && !Fits(join_tokens + later * FailJoinTokens())) {
        Note("joined message from thread " + std::to_string(ToIndex(child.id)) +
             " does not fit; replaced by FAIL");
        msg.reset();
        join_line = RenderJoin(msg);
        join_tokens = CountTokens(join_line);
      }
      rec_.context_tokens += join_tokens;
      Append(join_line);
      rec_.events.push_back(JoinEvent{msg});
      joined.push_back(std::move(msg));
      children->push_back(std::move(child));
    }
  }

  void Join(std::optional<std::string> message) {
    if (role_ == ThreadRole::kRoot) {
      Protocol("the root thread cannot join");
      return;
    }
    if (message && (message->empty() || *message == kFailSentinel)) {
      message.reset();
    }
    if (message) {
      const std::string line = RenderJoin(message);
      const std::size_t tokens = CountTokens(line);
      if (Used() + tokens <= budget_.context_cap_tokens) {
        rec_.generated_tokens += tokens;
        Append(line);
        rec_.events.push_back(JoinEvent{std::move(message)});
        Finish(ThreadEnd::kJoined);
        return;
      }
      Note("join message does not fit; replaced by FAIL");
    }
    ForceFailJoin();
  }

  void Answer(const AnswerAction& a, std::optional<Solution>* answer) {
    if (role_ == ThreadRole::kChild || answer == nullptr) {
      Protocol("child threads cannot answer");
      return;
    }
    std::string line = a.line;
    if (line.empty()) {
      try {
        line = RenderAnswer(*task_, a.solution);
      } catch (const std::invalid_argument& e) {
        Protocol(std::string("unrenderable answer: ") + e.what());
        return;
      }
    }
    auto parsed = ParseAnswer(line);
    if (!parsed || line.find('\n') != std::string::npos) {
      Protocol("malformed answer line");
      return;
    }
    const std::size_t tokens = CountTokens(line);
    if (!Fits(tokens)) {
      Overflow();
      return;
    }
    rec_.generated_tokens += tokens;
    Append(line);
    rec_.events.push_back(StepEvent{std::move(line)});
    *answer = std::move(parsed->solution);
    Finish(ThreadEnd::kAnswered);
  }

  const Policy& policy_;
  ThreadRole role_;
  const Task* task_;
  const BudgetConfig& budget_;
  ThreadRecord rec_;
  std::string window_;
  std::size_t reserve_ = 0;
  bool done_ = false;
  std::vector<std::string> notes_;
};

ChildResult RunChild(const Policy& policy, ThreadId id, ThreadId parent,
                     const std::string& message, const BudgetConfig& budget) {
  ThreadDriver driver(policy, ThreadRole::kChild, id, parent, message, nullptr,
                      budget);
  driver.Run(nullptr, nullptr, nullptr);
  return {driver.TakeRecord(), driver.TakeDiagnostics()};
}

class ScriptedThread : public PolicyThread {
 public:
  explicit ScriptedThread(const std::vector<Action>* script) : script_(script) {}

  Action Next(const ThreadView&) override {
    if (script_ == nullptr || pos_ >= script_->size()) return GiveUpAction{};
    return (*script_)[pos_++];
  }

 private:
  const std::vector<Action>* script_;
  std::size_t pos_ = 0;
};

}  // namespace

void CheckBudget(const BudgetConfig& budget) {
  if (budget.context_cap_tokens < 1) {
    throw std::invalid_argument("context_cap_tokens must be >= 1");
  }
  if (budget.max_child_threads > kMaxChildThreads) {
    throw std::invalid_argument("max_child_threads must be <= 10");
  }
  if (budget.enforce_child_count && *budget.enforce_child_count > kMaxChildThreads) {
    throw std::invalid_argument("enforce_child_count must be <= 10");
  }
}

void CheckPool(const WorkerPool& pool) {
  if (pool.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(pool.per_token_ms >= 0.0) || !(pool.spawn_overhead_ms >= 0.0)) {
    throw std::invalid_argument("durations must be >= 0");
  }
}

std::size_t FailJoinTokens() {
  static const std::size_t tokens = CountTokens(RenderJoin(std::nullopt));
  return tokens;
}

Trace ThreadRuntime::Run(const Policy& policy, const Task& task,
                         const BudgetConfig& budget,
                         const WorkerPool& pool) const {
  CheckTask(task);
  CheckBudget(budget);
  CheckPool(pool);
  const std::size_t parallel = std::max<std::size_t>(1, options_.max_parallel_children);

  ThreadDriver::Spawner spawner =
      [&](const std::vector<std::string>& messages, ThreadId first) {
        std::vector<ChildResult> results(messages.size());
        auto id_of = [&](std::size_t i) {
          return ThreadId{ToIndex(first) + static_cast<std::uint32_t>(i)};
        };
        if (parallel == 1) {
          for (std::size_t i = 0; i < messages.size(); ++i) {
            results[i] = RunChild(policy, id_of(i), kRootThread, messages[i], budget);
          }
          return results;
        }
        for (std::size_t start = 0; start < messages.size(); start += parallel) {
          const std::size_t end = std::min(messages.size(), start + parallel);
          std::vector<std::future<ChildResult>> futures;
          for (std::size_t i = start; i < end; ++i) {
            futures.push_back(std::async(std::launch::async, RunChild,
                                         std::cref(policy), id_of(i), kRootThread,
                                         std::cref(messages[i]), std::cref(budget)));
          }
          for (std::size_t i = start; i < end; ++i) {
            results[i] = futures[i - start].get();
          }
        }
        return results;
      };

  ThreadDriver root(policy, ThreadRole::kRoot, kRootThread, std::nullopt,
                    RenderState(SearchState::Start(task)), &task, budget);
  std::vector<ThreadRecord> children;
  Trace trace;
  root.Run(spawner, &children, &trace.answer);
  trace.threads.push_back(root.TakeRecord());
  trace.diagnostics = root.TakeDiagnostics();
  for (auto& c : children) trace.threads.push_back(std::move(c));
  for (const auto& t : trace.threads) {
    trace.thread_ms.push_back(static_cast<double>(t.generated_tokens) *
                              pool.per_token_ms);
  }
  return trace;
}

std::size_t ListScheduleMakespan(std::vector<std::size_t> jobs,
                                 std::size_t workers) {
  if (jobs.empty()) return 0;
  workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  std::stable_sort(jobs.begin(), jobs.end(), std::greater<>());
  std::vector<std::size_t> load(workers, 0);
  for (std::size_t job : jobs) {
    auto least = std::min_element(load.begin(), load.end());
    *least += job;
  }
  return *std::max_element(load.begin(), load.end());
}

double SimulateLatency(const Trace& trace, const WorkerPool& pool) {
  CheckPool(pool);
  if (trace.threads.empty()) return 0.0;
  const ThreadRecord& root = trace.root();
  std::size_t critical = root.generated_tokens;
  std::size_t spawns = 0;
  for (const ThreadEvent& ev : root.events) {
    const auto* spawn = std::get_if<SpawnEvent>(&ev);
    if (spawn == nullptr) continue;
    ++spawns;
    std::vector<std::size_t> jobs;
    for (ThreadId c : spawn->child_ids) {
      jobs.push_back(trace.threads.at(ToIndex(c)).generated_tokens);
    }
    critical += ListScheduleMakespan(std::move(jobs), pool.workers);
  }
  return static_cast<double>(critical) * pool.per_token_ms +
         static_cast<double>(spawns) * pool.spawn_overhead_ms;
}

std::unique_ptr<PolicyThread> ScriptedPolicy::Open(ThreadRole role,
                                                   std::string_view prefix) const {
  if (role == ThreadRole::kRoot) return std::make_unique<ScriptedThread>(&root_);
  auto it = children_.find(std::string(prefix));
  return std::make_unique<ScriptedThread>(it == children_.end() ? nullptr
                                                                : &it->second);
}

}  // namespace apr
