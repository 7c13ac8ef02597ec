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


#include "apr/corpus.h"

#include <fstream>
#include <stdexcept>

#include "apr/parallel.h"
#include "apr/random.h"
#include "json.hpp"

namespace apr {
namespace {

using nlohmann::json;

ThreadEnd RootEndFor(SolveStatus status) {
  switch (status) {
    case SolveStatus::kGoalReached: return ThreadEnd::kAnswered;
    case SolveStatus::kBudgetExhausted: return ThreadEnd::kBudgetExhausted;
    case SolveStatus::kProtocolError: return ThreadEnd::kProtocolError;
    case SolveStatus::kNoResult: break;
  }
  return ThreadEnd::kNoResult;
}

}  // namespace

std::optional<SolveStatus> SolveStatusFromString(std::string_view s) {
  for (SolveStatus st : {SolveStatus::kGoalReached, SolveStatus::kNoResult,
                         SolveStatus::kBudgetExhausted,
                         SolveStatus::kProtocolError}) {
    if (ToString(st) == s) return st;
  }
  return std::nullopt;
}

std::vector<CorpusRecord> GenerateCorpus(const std::vector<Task>& tasks,
                                         const CorpusConfig& config) {
  CheckExpansionConfig(config.expansion);
  CheckBudget(config.budget);
  std::vector<CorpusRecord> records(tasks.size());
  ParallelFor(tasks.size(), config.threads, [&](std::size_t i) {
    ExpansionConfig cfg = config.expansion;
    cfg.rng_seed = MixSeed(config.expansion.rng_seed, i);
    SolveOutcome out =
        config.solver == SearchMode::kSosPlus
            ? SolveSosPlus(tasks[i], cfg, config.budget)
            : SolveApr(tasks[i], cfg, config.budget, ThreadRuntime(), {},
                       config.spawn_width_bias);
    CorpusRecord& rec = records[i];
    rec.task = tasks[i];
    rec.text = Encode(*out.trace);
    rec.status = out.status;
    rec.condition = config.solver == SearchMode::kSosPlus
                        ? LengthBinTag(TotalTokens(*out.trace))
                        : ChildCountTag(ChildCount(*out.trace));
  });
  return records;
}

std::size_t RecordTotalTokens(const CorpusRecord& record) {
  return TotalTokens(Decode(record.text));
}

bool PassesRejectionFilter(const CorpusRecord& record, std::size_t cap) {
  return record.status == SolveStatus::kGoalReached &&
         RecordTotalTokens(record) <= cap;
}

std::string CorpusRecordToJson(const CorpusRecord& record) {
  json threads = json::array();
  for (const ThreadText& t : record.text.threads) {
    threads.push_back({
        {"id", ToIndex(t.id)},
        {"parent", t.parent ? json(ToIndex(*t.parent)) : json(nullptr)},
        {"context", t.context},
        {"generated", t.generated},
    });
  }
  json j = {
      {"schema_version", kCorpusSchemaVersion},
      {"task", {{"inputs", record.task.inputs}, {"target", record.task.target}}},
      {"threads", std::move(threads)},
      {"condition",
       {{"kind", std::string(ToString(record.condition.kind))},
        {"value", record.condition.value}}},
      {"status", std::string(ToString(record.status))},
  };
  return j.dump();
}

CorpusRecord CorpusRecordFromJson(const std::string& line) {
  CorpusRecord rec;
  try {
    json j = json::parse(line);
    if (j.at("schema_version").get<int>() != kCorpusSchemaVersion) {
      throw std::invalid_argument("unsupported corpus schema_version");
    }
    rec.task.inputs = j.at("task").at("inputs").get<std::vector<Value>>();
    rec.task.target = j.at("task").at("target").get<Value>();
    for (const json& t : j.at("threads")) {
      ThreadText tt;
      tt.id = ThreadId{t.at("id").get<std::uint32_t>()};
      if (!t.at("parent").is_null()) {
        tt.parent = ThreadId{t.at("parent").get<std::uint32_t>()};
      }
      tt.context = t.at("context").get<std::string>();
      tt.generated = t.at("generated").get<std::string>();
      rec.text.threads.push_back(std::move(tt));
    }
    const std::string kind = j.at("condition").at("kind").get<std::string>();
    if (kind == ToString(ConditionKind::kLengthBin)) {
      rec.condition.kind = ConditionKind::kLengthBin;
    } else if (kind == ToString(ConditionKind::kChildCount)) {
      rec.condition.kind = ConditionKind::kChildCount;
    } else {
      throw std::invalid_argument("unknown condition kind " + kind);
    }
    rec.condition.value = j.at("condition").at("value").get<std::size_t>();
    auto status = SolveStatusFromString(j.at("status").get<std::string>());
    if (!status) throw std::invalid_argument("unknown status");
    rec.status = *status;
    rec.text.status = RootEndFor(rec.status);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad corpus record: ") + e.what());
  }
  CheckTask(rec.task);
  return rec;
}

void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write corpus " + path.string());
  for (const CorpusRecord& r : records) out << CorpusRecordToJson(r) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<CorpusRecord> ReadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  std::vector<CorpusRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      records.push_back(CorpusRecordFromJson(line));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(e.what());
    }
  }
  return records;
}

}  // namespace apr
