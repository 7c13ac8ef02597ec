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


// Demonstration corpus: one JSON Lines record per task holding every
// thread's canonical text and the conditioning tag a model would be
// trained with.

#ifndef APR_CORPUS_H_
#define APR_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "apr/codec.h"
#include "apr/countdown.h"
#include "apr/runtime.h"
#include "apr/search.h"
#include "apr/solvers.h"

namespace apr {

inline constexpr int kCorpusSchemaVersion = 1;

struct CorpusRecord {
  Task task;
  TraceText text;
  ConditionTag condition;
  SolveStatus status = SolveStatus::kNoResult;

  bool operator==(const CorpusRecord&) const = default;
};

struct CorpusConfig {
  SearchMode solver = SearchMode::kSosPlus;
  ExpansionConfig expansion;
  BudgetConfig budget;
  double spawn_width_bias = 0.0;
  std::size_t threads = 1;
};

// Solves every task and tags it: length bin of the total generated tokens
// for SoS+, child count for APR. Failed runs are kept with their status.
// Task i uses expansion seed MixSeed(expansion.rng_seed, i).
std::vector<CorpusRecord> GenerateCorpus(const std::vector<Task>& tasks,
                                         const CorpusConfig& config);

// Keeps solved records whose total generated tokens fit `cap`.
bool PassesRejectionFilter(const CorpusRecord& record, std::size_t cap);

// Sum of per-thread generated tokens recovered from the text.
std::size_t RecordTotalTokens(const CorpusRecord& record);

std::string CorpusRecordToJson(const CorpusRecord& record);
// Throws std::invalid_argument on schema violations.
CorpusRecord CorpusRecordFromJson(const std::string& line);

// Throw std::runtime_error on I/O failure.
void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<CorpusRecord>& records);
std::vector<CorpusRecord> ReadCorpus(const std::filesystem::path& path);

std::optional<SolveStatus> SolveStatusFromString(std::string_view s);

}  // namespace apr

#endif  // APR_CORPUS_H_
