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


// apr_lab: task generation, solving, evaluation, corpus generation, sweeps
// and tuning from the command line.
//
// Every subcommand writes under --out and leaves a config.toml there;
// `apr_lab --config <out>/config.toml` reruns it with identical outputs.
//
// Exit codes: 0 ok, 2 usage, 3 I/O, 4 runtime protocol error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apr/codec.h"
#include "apr/corpus.h"
#include "apr/countdown.h"
#include "apr/experiment.h"
#include "apr/external_policy.h"
#include "apr/metrics.h"
#include "apr/parallel.h"
#include "apr/random.h"
#include "apr/solvers.h"
#include "apr/tuner.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitProtocol = 4;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t threads = apr::DefaultThreads();
};

struct SearchFlags {
  std::size_t beam_k = 5;
  double promising_p = 0.1;
  std::size_t cap = 4096;
  std::size_t max_children = 10;
  double width_bias = 0.0;
  std::size_t workers = 7;
  double per_token_ms = 2.0;
  double spawn_overhead_ms = 0.0;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output directory")->required();
  app->add_option("--seed", c.seed, "Experiment seed")->envname("APR_LAB_SEED");
  app->add_option("--threads", c.threads, "Worker threads for per-task parallelism")
      ->check(CLI::PositiveNumber);
}

void AddSearch(CLI::App* app, SearchFlags& s) {
  app->add_option("--beam-k", s.beam_k, "Successors kept per expansion")
      ->check(CLI::Range(1, 1000));
  app->add_option("--promising-p", s.promising_p, "is_promising rate")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--cap", s.cap, "Per-thread context cap in tokens")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-children", s.max_children, "Children allowed per trace")
      ->check(CLI::Range(0, 10));
  app->add_option("--width-bias", s.width_bias, "Added to the spawn width")
      ->check(CLI::Range(-4.0, 0.0));
  app->add_option("--workers", s.workers, "Simulated workers for latency")
      ->check(CLI::PositiveNumber);
  app->add_option("--per-token-ms", s.per_token_ms, "Simulated time per token")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--spawn-overhead-ms", s.spawn_overhead_ms,
                  "Simulated time per spawn")
      ->check(CLI::NonNegativeNumber);
}

apr::RunSettings Settings(const SearchFlags& s, const Common& c) {
  apr::RunSettings r;
  r.expansion.beam_k = s.beam_k;
  r.expansion.promising_p = s.promising_p;
  r.expansion.rng_seed = c.seed;
  r.budget.context_cap_tokens = s.cap;
  r.budget.max_child_threads = s.max_children;
  r.spawn_width_bias = s.width_bias;
  r.pool.workers = s.workers;
  r.pool.per_token_ms = s.per_token_ms;
  r.pool.spawn_overhead_ms = s.spawn_overhead_ms;
  r.threads = c.threads;
  return r;
}

std::string Describe(const apr::RunSettings& r) {
  return "k=" + std::to_string(r.expansion.beam_k) +
         ";p=" + apr::FormatNumber(r.expansion.promising_p) +
         ";cap=" + std::to_string(r.budget.context_cap_tokens);
}

fs::path PrepareOut(const Common& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  return dir;
}

void WriteSnapshot(const fs::path& dir, CLI::App* sub) {
  std::ofstream out(dir / "config.toml", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config snapshot");
  out << "[" << sub->get_name() << "]\n" << sub->config_to_str(true, false);
  if (!out) throw std::runtime_error("cannot write config snapshot");
}

std::vector<apr::Task> LoadOrSample(const std::string& tasks_path, std::size_t n,
                                    std::size_t inputs, std::uint64_t seed) {
  if (!tasks_path.empty()) return apr::ReadTasks(tasks_path);
  if (n == 0) throw UsageError("--n must be >= 1 when --tasks is not given");
  apr::SampleOptions so;
  so.n = n;
  so.num_inputs = inputs;
  so.seed = seed;
  return apr::SampleTasks(so);
}

// Parses "a..b" (inclusive, step 1) or a comma list.
std::vector<std::size_t> ParseValues(const std::string& text) {
  std::vector<std::size_t> values;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const std::size_t lo = std::stoul(text.substr(0, dots));
      const std::size_t hi = std::stoul(text.substr(dots + 2));
      if (hi < lo) throw UsageError("empty range " + text);
      for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(std::stoul(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad --values '" + text + "'");
  }
  if (values.empty()) throw UsageError("--values is empty");
  return values;
}

// ---------------------------------------------------------------- gen-tasks

struct GenTasks {
  Common common;
  std::size_t n = 1000;
  std::size_t inputs = 4;
  apr::Value max_target = 100;
  apr::Value min_input = 1;
  apr::Value max_input = 99;
};

int RunGenTasks(const GenTasks& g, CLI::App* sub) {
  if (g.n == 0) throw UsageError("--n must be >= 1");
  apr::SampleOptions so;
  so.n = g.n;
  so.num_inputs = g.inputs;
  so.max_target = g.max_target;
  so.min_input = g.min_input;
  so.max_input = g.max_input;
  so.seed = g.common.seed;
  std::vector<apr::Task> tasks;
  try {
    tasks = apr::SampleTasks(so);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = PrepareOut(g.common);
  apr::WriteTasks(dir / "tasks.jsonl", tasks);
  WriteSnapshot(dir, sub);
  std::cout << "wrote " << tasks.size() << " tasks to " << (dir / "tasks.jsonl").string()
            << '\n';
  return 0;
}

// -------------------------------------------------------------------- solve

struct Solve {
  Common common;
  SearchFlags search;
  std::string tasks;
  std::string method = "apr";
  std::optional<std::size_t> children;
  std::string endpoint;
  std::size_t parallel_children = 1;
};

apr::EndpointConfig ParseEndpoint(const std::string& text) {
  // host:port[/path]
  apr::EndpointConfig cfg;
  std::string rest = text;
  if (rest.starts_with("http://")) rest = rest.substr(7);
  const auto slash = rest.find('/');
  if (slash != std::string::npos) {
    cfg.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos) throw UsageError("--endpoint needs host:port");
  cfg.host = rest.substr(0, colon);
  try {
    cfg.port = std::stoi(rest.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw UsageError("bad port in --endpoint");
  }
  return cfg;
}

int RunSolve(const Solve& s, CLI::App* sub) {
  if (s.tasks.empty()) throw UsageError("--tasks is required");
  const std::vector<apr::Task> tasks = apr::ReadTasks(s.tasks);
  apr::RunSettings settings = Settings(s.search, s.common);
  std::vector<apr::SolveOutcome> outcomes;
  std::string method_name = s.method;
  if (s.method == "external") {
    if (s.endpoint.empty()) throw UsageError("--method external needs --endpoint");
    apr::ExternalPolicy policy(apr::HttpTransport(ParseEndpoint(s.endpoint)));
    apr::BudgetConfig budget = settings.budget;
    if (s.children) budget.enforce_child_count = *s.children;
    apr::ThreadRuntime runtime({s.parallel_children});
    outcomes.resize(tasks.size());
    apr::ParallelFor(tasks.size(), s.common.threads, [&](std::size_t i) {
      outcomes[i] = apr::OutcomeFromTrace(
          tasks[i], runtime.Run(policy, tasks[i], budget, settings.pool));
    });
  } else {
    apr::MethodSpec spec;
    try {
      spec = apr::ParseMethod(s.method);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (s.children) {
      if (spec.mode != apr::SearchMode::kApr) {
        throw UsageError("--children applies to --method apr");
      }
      spec.children = *s.children;
    }
    method_name = apr::ToString(spec);
    outcomes = apr::RunMethod(tasks, spec, settings);
  }

  const fs::path dir = PrepareOut(s.common);
  std::ofstream out(dir / "outcomes.jsonl", std::ios::binary | std::ios::trunc);
  std::ofstream traces(dir / "traces.jsonl", std::ios::binary | std::ios::trunc);
  if (!out || !traces) throw std::runtime_error("cannot write solve outputs");
  bool protocol_error = false;
  std::size_t solved = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const apr::SolveOutcome& o = outcomes[i];
    const apr::Trace& t = *o.trace;
    protocol_error |= o.status == apr::SolveStatus::kProtocolError;
    solved += o.status == apr::SolveStatus::kGoalReached;
    json row = {
        {"task_index", i},
        {"method", method_name},
        {"status", std::string(apr::ToString(o.status))},
        {"solution", o.solution ? json(apr::RenderAnswer(tasks[i], *o.solution))
                                : json(nullptr)},
        {"total_tokens", apr::TotalTokens(t)},
        {"sequential_tokens", apr::SequentialTokens(t)},
        {"child_count", apr::ChildCount(t)},
        {"max_thread_tokens", apr::MaxThreadTokens(t)},
        {"latency_ms", apr::SimulateLatency(t, settings.pool)},
        {"diagnostics", t.diagnostics},
    };
    out << row.dump() << '\n';
    apr::CorpusRecord rec{tasks[i], apr::Encode(t), apr::LengthBinTag(apr::TotalTokens(t)),
                          o.status};
    if (s.method != "sos+") rec.condition = apr::ChildCountTag(apr::ChildCount(t));
    traces << apr::CorpusRecordToJson(rec) << '\n';
  }
  if (!out || !traces) throw std::runtime_error("write failed in " + dir.string());
  WriteSnapshot(dir, sub);
  std::cout << method_name << ": solved " << solved << "/" << tasks.size() << '\n';
  return protocol_error ? kExitProtocol : 0;
}

// --------------------------------------------------------------------- eval

struct Eval {
  Common common;
  SearchFlags search;
  std::string tasks;
  std::vector<std::string> methods{"sos+", "apr"};
  std::size_t cons_n = 1;
};

int RunEval(const Eval& e, CLI::App* sub) {
  if (e.tasks.empty()) throw UsageError("--tasks is required");
  if (e.cons_n == 0) throw UsageError("--cons-n must be >= 1");
  std::vector<apr::MethodSpec> specs;
  try {
    for (const std::string& m : e.methods) specs.push_back(apr::ParseMethod(m));
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  const std::vector<apr::Task> tasks = apr::ReadTasks(e.tasks);
  if (tasks.empty()) throw UsageError("task file is empty");
  const apr::RunSettings settings = Settings(e.search, e.common);
  const fs::path dir = PrepareOut(e.common);

  std::vector<apr::EvalReport> reports;
  std::ofstream pc(dir / "pass_cons.csv", std::ios::binary | std::ios::trunc);
  if (!pc) throw std::runtime_error("cannot write pass_cons.csv");
  pc << "n,pass_at_n,cons_at_n,n_tasks,method\n";
  for (const apr::MethodSpec& spec : specs) {
    std::vector<std::vector<apr::SolveOutcome>> matrix(tasks.size());
    for (std::size_t s = 0; s < e.cons_n; ++s) {
      std::vector<apr::SolveOutcome> run = apr::RunMethod(tasks, spec, settings, s);
      if (s == 0) reports.push_back(apr::MakeReport(spec, Describe(settings), run, settings.pool));
      for (std::size_t i = 0; i < tasks.size(); ++i) matrix[i].push_back(std::move(run[i]));
    }
    for (std::size_t n = 1; n <= e.cons_n; ++n) {
      pc << n << ',' << apr::FormatNumber(apr::PassAtN(tasks, matrix, n)) << ','
         << apr::FormatNumber(apr::ConsAtN(tasks, matrix, n)) << ',' << tasks.size()
         << ',' << apr::ToString(spec) << '\n';
    }
  }
  if (!pc) throw std::runtime_error("write failed for pass_cons.csv");
  apr::ComputeCurves(dir, reports);
  apr::WriteReportJsonl(dir / "report.jsonl", reports);
  WriteSnapshot(dir, sub);
  for (const apr::EvalReport& r : reports) {
    std::cout << r.method << ": accuracy " << apr::FormatNumber(r.accuracy())
              << " mean_total_tokens " << apr::FormatNumber(r.mean_total_tokens())
              << " mean_sequential_tokens "
              << apr::FormatNumber(r.mean_sequential_tokens()) << '\n';
  }
  return 0;
}

// ----------------------------------------------------------------- gen-data

struct GenData {
  Common common;
  SearchFlags search;
  std::string tasks;
  std::size_t n = 1000;
  std::size_t inputs = 4;
  std::string solver = "sos+";
  std::optional<std::size_t> children;
  bool filter = false;
};

int RunGenData(const GenData& g, CLI::App* sub) {
  const std::vector<apr::Task> tasks =
      LoadOrSample(g.tasks, g.n, g.inputs, g.common.seed);
  const apr::RunSettings settings = Settings(g.search, g.common);
  apr::CorpusConfig cfg;
  if (g.solver == "sos+") {
    cfg.solver = apr::SearchMode::kSosPlus;
  } else if (g.solver == "apr") {
    cfg.solver = apr::SearchMode::kApr;
  } else {
    throw UsageError("--solver must be sos+ or apr");
  }
  cfg.expansion = settings.expansion;
  cfg.budget = settings.budget;
  if (g.children) {
    cfg.budget.enforce_child_count = *g.children;
    cfg.budget.max_child_threads = std::max(cfg.budget.max_child_threads, *g.children);
  }
  cfg.spawn_width_bias = settings.spawn_width_bias;
  cfg.threads = settings.threads;
  std::vector<apr::CorpusRecord> records = apr::GenerateCorpus(tasks, cfg);
  const std::size_t generated = records.size();
  if (g.filter) {
    std::erase_if(records, [&](const apr::CorpusRecord& r) {
      return !apr::PassesRejectionFilter(r, settings.budget.context_cap_tokens);
    });
  }
  const fs::path dir = PrepareOut(g.common);
  apr::WriteCorpus(dir / "corpus.jsonl", records);
  WriteSnapshot(dir, sub);
  std::cout << "wrote " << records.size() << "/" << generated << " records to "
            << (dir / "corpus.jsonl").string() << '\n';
  return 0;
}

// -------------------------------------------------------------------- sweep

struct Sweep {
  Common common;
  SearchFlags search;
  std::string tasks;
  std::size_t n = 200;
  std::size_t inputs = 4;
  std::string axis = "children";
  std::string values;
  std::vector<std::size_t> caps{4096};
  std::vector<std::string> methods{"sos+", "apr@3", "apr@6", "apr@10"};
};

int RunSweep(const Sweep& w, CLI::App* sub) {
  const std::vector<apr::Task> tasks =
      LoadOrSample(w.tasks, w.n, w.inputs, w.common.seed);
  apr::RunSettings settings = Settings(w.search, w.common);
  std::vector<apr::CurvePoint> points;
  auto point = [&](double x, const std::vector<apr::SolveOutcome>& outs,
                   const apr::MethodSpec& spec, std::string config) {
    std::size_t hits = 0;
    for (const auto& o : outs) hits += o.status == apr::SolveStatus::kGoalReached;
    points.push_back({x, double(hits) / double(outs.size()), outs.size(),
                      apr::ToString(spec), std::move(config)});
  };
  if (w.axis == "children") {
    const auto values = ParseValues(w.values.empty() ? "0..10" : w.values);
    for (std::size_t cap : w.caps) {
      if (cap == 0) throw UsageError("--caps must be positive");
      settings.budget.context_cap_tokens = cap;
      for (std::size_t c : values) {
        if (c > apr::kMaxChildThreads) throw UsageError("child counts must be <= 10");
        apr::MethodSpec spec{apr::SearchMode::kApr, c};
        point(double(c), apr::RunMethod(tasks, spec, settings), spec,
              "cap=" + std::to_string(cap) + ";k=" + std::to_string(w.search.beam_k));
      }
    }
  } else if (w.axis == "cap") {
    const auto values = ParseValues(w.values.empty() ? "1024,2048,3072,4096" : w.values);
    for (const std::string& m : w.methods) {
      apr::MethodSpec spec;
      try {
        spec = apr::ParseMethod(m);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      for (std::size_t cap : values) {
        if (cap == 0) throw UsageError("caps must be positive");
        settings.budget.context_cap_tokens = cap;
        point(double(cap), apr::RunMethod(tasks, spec, settings), spec,
              "k=" + std::to_string(w.search.beam_k));
      }
    }
  } else {
    throw UsageError("--axis must be children or cap");
  }
  const fs::path dir = PrepareOut(w.common);
  const fs::path csv = dir / ("sweep_" + w.axis + ".csv");
  std::ofstream out(csv, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out << "x_value,accuracy,n_tasks,method,config\n";
  for (const auto& p : points) {
    out << apr::FormatNumber(p.x_value) << ',' << apr::FormatNumber(p.accuracy) << ','
        << p.n_tasks << ',' << p.method << ',' << p.config << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + csv.string());
  WriteSnapshot(dir, sub);
  std::cout << "wrote " << points.size() << " rows to " << csv.string() << '\n';
  return 0;
}

// --------------------------------------------------------------------- tune

struct Tune {
  Common common;
  std::string tasks;
  std::size_t train_n = 1000;
  std::size_t val_n = 500;
  std::size_t inputs = 4;
  bool width_sensitive = false;
  std::size_t steps = 150;
  std::size_t group = 5;
  std::size_t batch = 64;
  std::size_t eval_every = 25;
  double clip = 0.2;
  double sigma = 0.1;
  double lr = 1.0;
  std::size_t cap = 4096;
  std::optional<std::size_t> children;
  double init_p = 0.01;
  std::size_t init_k = 15;
  std::size_t init_max_children = 10;
  double init_bias = 0.0;
};

int RunTune(const Tune& t, CLI::App* sub) {
  if (t.group < 2) throw UsageError("--group must be >= 2");
  std::vector<apr::Task> pool = LoadOrSample(
      t.tasks, t.train_n + t.val_n, t.inputs, t.common.seed);
  apr::TunerConfig cfg;
  cfg.steps = t.steps;
  cfg.group_size = t.group;
  cfg.batch_tasks = t.batch;
  cfg.eval_every = t.eval_every;
  cfg.clip_ratio = t.clip;
  cfg.sigma = t.sigma;
  cfg.learning_rate = t.lr;
  cfg.budget.context_cap_tokens = t.cap;
  cfg.threads = t.common.threads;
  if (t.children) {
    cfg.budget.enforce_child_count = *t.children;
    cfg.tune_max_child_threads = false;
  }
  apr::PolicyParams init{t.init_p, t.init_k, t.init_max_children, t.init_bias};
  try {
    apr::CheckParams(init);
    apr::CheckTunerConfig(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (t.width_sensitive) {
    apr::ExpansionConfig probe;
    probe.beam_k = t.init_k;
    probe.promising_p = t.init_p;
    probe.rng_seed = t.common.seed;
    std::vector<char> keep(pool.size(), 0);
    apr::ParallelFor(pool.size(), t.common.threads, [&](std::size_t i) {
      keep[i] = apr::WidthSensitive(pool[i], probe, cfg.budget);
    });
    std::vector<apr::Task> kept;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (keep[i]) kept.push_back(pool[i]);
    }
    pool = std::move(kept);
  }
  if (pool.size() < 2) throw UsageError("not enough tasks to split");
  const std::size_t n_val = std::min(t.val_n, pool.size() / 2);
  std::vector<apr::Task> val(pool.end() - static_cast<std::ptrdiff_t>(n_val), pool.end());
  std::vector<apr::Task> train(pool.begin(), pool.end() - static_cast<std::ptrdiff_t>(n_val));
  apr::TuneResult r = apr::Tune(init, train, val, cfg, t.common.seed);

  const fs::path dir = PrepareOut(t.common);
  apr::WriteLearningCurve(dir / "learning_curve.csv", r.curve);
  json params = {
      {"initial",
       {{"promising_p", init.promising_p}, {"beam_k", init.beam_k},
        {"max_child_threads", init.max_child_threads},
        {"spawn_width_bias", init.spawn_width_bias},
        {"validation_accuracy", r.initial.accuracy}}},
      {"tuned",
       {{"promising_p", r.params.promising_p}, {"beam_k", r.params.beam_k},
        {"max_child_threads", r.params.max_child_threads},
        {"spawn_width_bias", r.params.spawn_width_bias}}},
      {"early_stopped", r.early_stopped},
      {"diagnostic", r.diagnostic},
      {"train_tasks", train.size()},
      {"validation_tasks", val.size()},
  };
  std::ofstream out(dir / "tuned_params.json", std::ios::binary | std::ios::trunc);
  out << params.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write tuned_params.json");
  WriteSnapshot(dir, sub);
  std::cout << "initial accuracy " << apr::FormatNumber(r.initial.accuracy);
  if (!r.curve.empty()) {
    std::cout << ", final " << apr::FormatNumber(r.curve.back().stats.accuracy);
  }
  std::cout << '\n';
  if (!r.diagnostic.empty()) std::cerr << r.diagnostic << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel and serialized Countdown search experiments"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Replay a config.toml snapshot");
  app.require_subcommand(1);

  GenTasks gen_tasks;
  auto* s_gen = app.add_subcommand("gen-tasks", "Sample solvable tasks")->configurable();
  AddCommon(s_gen, gen_tasks.common);
  s_gen->add_option("--n", gen_tasks.n, "Number of tasks");
  s_gen->add_option("--inputs", gen_tasks.inputs, "Numbers per task")
      ->check(CLI::Range(2, 5));
  s_gen->add_option("--max-target", gen_tasks.max_target)->check(CLI::PositiveNumber);
  s_gen->add_option("--min-input", gen_tasks.min_input)->check(CLI::PositiveNumber);
  s_gen->add_option("--max-input", gen_tasks.max_input)->check(CLI::PositiveNumber);

  Solve solve;
  auto* s_solve = app.add_subcommand("solve", "Solve a task file")->configurable();
  AddCommon(s_solve, solve.common);
  AddSearch(s_solve, solve.search);
  s_solve->add_option("--tasks", solve.tasks, "Task JSONL file");
  s_solve->add_option("--method", solve.method, "sos+, apr, apr@N or external");
  s_solve->add_option("--children", solve.children, "Force this many children")
      ->check(CLI::Range(0, 10));
  s_solve->add_option("--endpoint", solve.endpoint, "host:port[/path] for external");
  s_solve->add_option("--parallel-children", solve.parallel_children,
                      "Children executed concurrently per spawn")
      ->check(CLI::PositiveNumber);

  Eval eval;
  auto* s_eval = app.add_subcommand("eval", "Metrics and curves")->configurable();
  AddCommon(s_eval, eval.common);
  AddSearch(s_eval, eval.search);
  s_eval->add_option("--tasks", eval.tasks, "Task JSONL file");
  s_eval->add_option("--method", eval.methods, "Methods to compare")
      ->delimiter(',');
  s_eval->add_option("--cons-n", eval.cons_n, "Samples per task for pass@n/cons@n");

  GenData gen_data;
  auto* s_data = app.add_subcommand("gen-data", "Demonstration corpus")->configurable();
  AddCommon(s_data, gen_data.common);
  AddSearch(s_data, gen_data.search);
  s_data->add_option("--tasks", gen_data.tasks, "Task JSONL file (else sampled)");
  s_data->add_option("--n", gen_data.n, "Tasks to sample");
  s_data->add_option("--inputs", gen_data.inputs)->check(CLI::Range(2, 5));
  s_data->add_option("--solver", gen_data.solver, "sos+ or apr");
  s_data->add_option("--children", gen_data.children, "Force this many children")
      ->check(CLI::Range(0, 10));
  s_data->add_flag("--filter", gen_data.filter,
                   "Keep solved records that fit the context cap");

  Sweep sweep;
  auto* s_sweep = app.add_subcommand("sweep", "Accuracy sweeps")->configurable();
  AddCommon(s_sweep, sweep.common);
  AddSearch(s_sweep, sweep.search);
  s_sweep->add_option("--tasks", sweep.tasks, "Task JSONL file (else sampled)");
  s_sweep->add_option("--n", sweep.n, "Tasks to sample");
  s_sweep->add_option("--inputs", sweep.inputs)->check(CLI::Range(2, 5));
  s_sweep->add_option("--axis", sweep.axis, "children or cap");
  s_sweep->add_option("--values", sweep.values, "a..b or comma list");
  s_sweep->add_option("--caps", sweep.caps, "Caps for the children axis")
      ->delimiter(',');
  s_sweep->add_option("--method", sweep.methods, "Methods for the cap axis")
      ->delimiter(',');

  Tune tune;
  auto* s_tune = app.add_subcommand("tune", "Group-relative parameter tuning")->configurable();
  AddCommon(s_tune, tune.common);
  s_tune->add_option("--tasks", tune.tasks, "Task JSONL file (else sampled)");
  s_tune->add_option("--train-n", tune.train_n);
  s_tune->add_option("--val-n", tune.val_n);
  s_tune->add_option("--inputs", tune.inputs)->check(CLI::Range(2, 5));
  s_tune->add_flag("--width-sensitive", tune.width_sensitive,
                   "Keep only tasks that forced children solve and no children do not");
  s_tune->add_option("--steps", tune.steps);
  s_tune->add_option("--group", tune.group);
  s_tune->add_option("--batch", tune.batch)->check(CLI::PositiveNumber);
  s_tune->add_option("--eval-every", tune.eval_every)->check(CLI::PositiveNumber);
  s_tune->add_option("--clip", tune.clip)->check(CLI::NonNegativeNumber);
  s_tune->add_option("--sigma", tune.sigma)->check(CLI::PositiveNumber);
  s_tune->add_option("--lr", tune.lr)->check(CLI::NonNegativeNumber);
  s_tune->add_option("--cap", tune.cap)->check(CLI::PositiveNumber);
  s_tune->add_option("--children", tune.children, "Hold the child count fixed")
      ->check(CLI::Range(0, 10));
  s_tune->add_option("--init-p", tune.init_p)->check(CLI::Range(0.0, 1.0));
  s_tune->add_option("--init-k", tune.init_k)->check(CLI::Range(1, 15));
  s_tune->add_option("--init-max-children", tune.init_max_children)
      ->check(CLI::Range(0, 10));
  s_tune->add_option("--init-bias", tune.init_bias)->check(CLI::Range(-4.0, 0.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*s_gen) return RunGenTasks(gen_tasks, s_gen);
    if (*s_solve) return RunSolve(solve, s_solve);
    if (*s_eval) return RunEval(eval, s_eval);
    if (*s_data) return RunGenData(gen_data, s_data);
    if (*s_sweep) return RunSweep(sweep, s_sweep);
    if (*s_tune) return RunTune(tune, s_tune);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
