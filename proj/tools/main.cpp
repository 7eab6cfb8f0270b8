// Copyright 2026 The DuplexKit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "duplexkit/alignment.hpp"
#include "duplexkit/corpus.hpp"
#include "duplexkit/metrics.hpp"
#include "duplexkit/random.hpp"
#include "duplexkit/sim.hpp"
#include "duplexkit/tokenizer.hpp"

namespace {

using namespace duplexkit;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Runs fn(0..count) across `jobs` threads; results land in index order, so
// output is identical for every --jobs value.
template <typename Fn>
void parallel_indexed(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  workers.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    workers.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& worker : workers) worker.join();
}

bool require_file(const std::string& path) {
  if (std::filesystem::exists(path)) return true;
  std::cerr << "error: no such file: " << path << "\n";
  return false;
}

int cmd_validate(const std::string& corpus_path) {
  if (!require_file(corpus_path)) return kUsage;
  CorpusScan scan = scan_corpus(corpus_path);
  std::size_t errors = scan.errors.size();
  for (const std::string& error : scan.errors) {
    std::cerr << "error: " << error << "\n";
  }

  std::size_t turns = 0;
  for (const DialogueRecord& dialogue : scan.dialogues) {
    turns += dialogue.turns.size();
    std::vector<ThinkingChain> chains;
    chains.reserve(dialogue.turns.size());
    for (const Turn& turn : dialogue.turns) chains.push_back(turn.chain);
    for (const BindingError& dangling : validate_ctx_bindings(chains)) {
      std::cerr << "error: dialogue " << dialogue.id << " turn " << dangling.turn << " node "
                << dangling.node << ": dangling @ctx:" << dangling.id << "\n";
      ++errors;
    }
  }

  std::cout << "dialogues=" << scan.dialogues.size() << " turns=" << turns
            << " errors=" << errors << "\n";
  return errors == 0 ? kOk : kFailure;
}

int cmd_align(const std::string& corpus_path, const std::string& out_path, bool no_thinking,
              const std::string& tokenizer_name, unsigned jobs) {
  if (!require_file(corpus_path)) return kUsage;
  const Tokenizer* tokenizer = find_tokenizer(tokenizer_name);
  if (tokenizer == nullptr) {
    std::cerr << "error: unknown tokenizer: " << tokenizer_name << "\n";
    return kUsage;
  }

  std::vector<DialogueRecord> dialogues;
  try {
    dialogues = load_corpus(corpus_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }

  std::vector<std::string> outputs(dialogues.size());
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  parallel_indexed(dialogues.size(), jobs, [&](std::size_t i) {
    try {
      std::string lines;
      const std::vector<AlignedTurn> aligned =
          align_dialogue(dialogues[i], *tokenizer, !no_thinking);
      for (std::size_t t = 0; t < aligned.size(); ++t) {
        nlohmann::ordered_json record;
        record["dialogue"] = dialogues[i].id;
        record["turn"] = t;
        record["bos_index"] = aligned[t].bos_index;
        record["eos_index"] = aligned[t].eos_index;
        nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
        for (const AgentTextToken& token : aligned[t].tokens) {
          if (token.is_control()) {
            tokens.push_back(std::string(to_string(token.control_kind())));
          } else {
            tokens.push_back(token.text_id());
          }
        }
        record["tokens"] = std::move(tokens);
        lines += record.dump();
        lines += '\n';
      }
      outputs[i] = std::move(lines);
    } catch (const CapacityError& err) {
      std::scoped_lock lock(error_mutex);
      std::cerr << "error: dialogue " << dialogues[i].id << ": " << err.what() << "\n";
      failed = true;
    }
  });
  if (failed) return kFailure;

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kFailure;
  }
  for (const std::string& chunk : outputs) out << chunk;
  std::cerr << "aligned " << dialogues.size() << " dialogues -> " << out_path << "\n";
  return kOk;
}

void print_histogram(const std::string& title, const std::map<std::size_t, std::size_t>& buckets,
                     std::size_t bucket_width) {
  std::cout << title << "\n";
  std::size_t max_count = 0;
  for (const auto& [_, count] : buckets) max_count = std::max(max_count, count);
  for (const auto& [bucket, count] : buckets) {
    const std::size_t lo = bucket * bucket_width;
    const std::size_t bar = max_count == 0 ? 0 : (40 * count + max_count - 1) / max_count;
    char range[40];
    std::snprintf(range, sizeof(range), "  [%4zu-%4zu] ", lo, lo + bucket_width - 1);
    std::cout << range << std::string(bar, '#') << ' ' << count << "\n";
  }
}

int cmd_stats(const std::string& corpus_path, const std::string& tokenizer_name) {
  if (!require_file(corpus_path)) return kUsage;
  const Tokenizer* tokenizer = find_tokenizer(tokenizer_name);
  if (tokenizer == nullptr) {
    std::cerr << "error: unknown tokenizer: " << tokenizer_name << "\n";
    return kUsage;
  }
  try {
    const std::vector<DialogueRecord> dialogues = load_corpus(corpus_path);
    const CompletenessReport report = completeness_stats(dialogues, *tokenizer);

    char line[128];
    std::snprintf(line, sizeof(line), "turns=%zu raw=%.2f%% placement=%.2f%%", report.turns,
                  report.raw_pct(), report.placement_pct());
    std::cout << line << "\n";

    constexpr std::size_t kBucket = 8;
    std::map<std::size_t, std::size_t> chain_hist;
    std::map<std::size_t, std::size_t> frame_hist;
    for (const DialogueRecord& dialogue : dialogues) {
      for (const Turn& turn : dialogue.turns) {
        std::size_t chain_tokens = 0;
        for (std::size_t len : node_token_lengths(turn.chain, *tokenizer)) chain_tokens += len;
        ++chain_hist[chain_tokens / kBucket];
        ++frame_hist[turn.user_frames / kBucket];
      }
    }
    print_histogram("chain token count:", chain_hist, kBucket);
    print_histogram("user frames (S):", frame_hist, kBucket);
    return kOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
}

int cmd_simulate(const std::string& corpus_path, const std::string& trace_out,
                 std::uint64_t seed, double barge_in_prob, double stop_delay,
                 const std::string& tokenizer_name, unsigned jobs) {
  if (!require_file(corpus_path)) return kUsage;
  const Tokenizer* tokenizer = find_tokenizer(tokenizer_name);
  if (tokenizer == nullptr) {
    std::cerr << "error: unknown tokenizer: " << tokenizer_name << "\n";
    return kUsage;
  }

  SimConfig config;
  config.seed = seed;
  config.barge_in_probability = barge_in_prob;
  config.stop_delay_s = stop_delay;

  std::vector<DialogueRecord> dialogues;
  try {
    dialogues = load_corpus(corpus_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }

  std::vector<SimTrace> traces(dialogues.size());
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  parallel_indexed(dialogues.size(), jobs, [&](std::size_t i) {
    try {
      const DialogueRecord marked =
          inject_barge_ins(dialogues[i], config, derive_stream_seed(config.seed, i));
      auto policy = make_scripted_policy(align_dialogue(marked, *tokenizer, true));
      traces[i] = run_dialogue(marked, *policy, config);
    } catch (const std::exception& err) {
      std::scoped_lock lock(error_mutex);
      std::cerr << "error: dialogue " << dialogues[i].id << ": " << err.what() << "\n";
      failed = true;
    }
  });
  if (failed) return kFailure;

  try {
    save_traces(traces, trace_out);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
  std::cerr << "simulated " << traces.size() << " dialogues -> " << trace_out << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& traces_path, double window_s,
                 const std::string& corpus_path, const std::string& tokenizer_name) {
  if (!require_file(traces_path)) return kUsage;
  try {
    const std::vector<SimTrace> traces = load_traces(traces_path);
    if (traces.empty()) {
      std::cerr << "error: trace file contains no traces\n";
      return kFailure;
    }
    std::optional<CompletenessReport> completeness;
    if (!corpus_path.empty()) {
      if (!require_file(corpus_path)) return kUsage;
      const Tokenizer* tokenizer = find_tokenizer(tokenizer_name);
      if (tokenizer == nullptr) {
        std::cerr << "error: unknown tokenizer: " << tokenizer_name << "\n";
        return kUsage;
      }
      completeness = completeness_stats(load_corpus(corpus_path), *tokenizer);
    }
    const MetricsReport report = aggregate(traces, completeness, window_s);
    std::cout << report_to_json(report).dump(2) << "\n";
    return kOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
}

int cmd_filter(const std::string& generated_path, const std::string& seeds_path,
               const std::string& out_path, const std::string& log_path, double threshold) {
  if (!require_file(generated_path) || !require_file(seeds_path)) return kUsage;
  try {
    const std::vector<DialogueRecord> generated = load_corpus(generated_path);
    const std::vector<DialogueRecord> seeds = load_corpus(seeds_path);
    const FilterResult result = filter_corpus(generated, seeds, threshold);
    if (result.seeds_empty) {
      std::cerr << "warning: seed corpus is empty; keeping everything\n";
    }

    save_corpus(result.kept, out_path);
    const std::string discards = log_path.empty() ? out_path + ".discards.jsonl" : log_path;
    std::ofstream log(discards, std::ios::binary);
    if (!log) {
      std::cerr << "error: cannot write " << discards << "\n";
      return kFailure;
    }
    for (const FilterDecision& decision : result.discarded) {
      nlohmann::ordered_json record;
      record["generated_id"] = decision.generated_id;
      record["best_seed_id"] = decision.best_seed_id;
      record["score"] = decision.score;
      log << record.dump() << '\n';
    }
    std::cout << "kept=" << result.kept.size() << " discarded=" << result.discarded.size()
              << "\n";
    return kOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duplexkit: thinking-chain alignment, duplex simulation, and metrics"};
  app.require_subcommand(1);

  std::string corpus_path;
  std::string out_path;
  std::string traces_path;
  std::string seeds_path;
  std::string log_path;
  std::string tokenizer_name = "whitespace";
  bool no_thinking = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  double barge_in_prob = 0.5;
  double stop_delay = 0.64;
  double window_s = 1.5;
  double threshold = 90.0;

  CLI::App* validate = app.add_subcommand("validate", "Check corpus records and ctx bindings");
  validate->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();

  CLI::App* align = app.add_subcommand("align", "Write aligned agent token streams");
  align->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();
  align->add_option("--out", out_path, "Output JSONL path")->required();
  align->add_flag("--no-thinking", no_thinking, "Plain silence layout without chains");
  align->add_option("--tokenizer", tokenizer_name, "Tokenizer name (default: whitespace)");
  align->add_option("--jobs", jobs, "Worker threads (default 1)");

  CLI::App* stats = app.add_subcommand("stats", "Completeness ratios and histograms");
  stats->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();
  stats->add_option("--tokenizer", tokenizer_name, "Tokenizer name (default: whitespace)");

  CLI::App* simulate = app.add_subcommand("simulate", "Inject barge-ins and replay a corpus");
  simulate->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();
  simulate->add_option("--seed", seed, "RNG seed")->required();
  simulate->add_option("--barge-in-prob", barge_in_prob, "Per-turn probability (default 0.5)");
  simulate->add_option("--stop-delay", stop_delay, "Stop delay seconds (default 0.64)");
  simulate->add_option("--trace-out", traces_path, "Trace output path")->required();
  simulate->add_option("--tokenizer", tokenizer_name, "Tokenizer name (default: whitespace)");
  simulate->add_option("--jobs", jobs, "Worker threads (default 1)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Compute duplex metrics from traces");
  evaluate->add_option("--traces", traces_path, "Trace file")->required();
  evaluate->add_option("--window", window_s, "Barge-in success window seconds (default 1.5)");
  evaluate->add_option("--corpus", corpus_path, "Optional corpus for completeness ratios");
  evaluate->add_option("--tokenizer", tokenizer_name, "Tokenizer name (default: whitespace)");

  CLI::App* filter = app.add_subcommand("filter", "Drop generated dialogues too close to seeds");
  filter->add_option("--generated", corpus_path, "Generated corpus (JSONL)")->required();
  filter->add_option("--seeds", seeds_path, "Seed corpus (JSONL)")->required();
  filter->add_option("--threshold", threshold, "Similarity threshold (default 90)");
  filter->add_option("--out", out_path, "Kept-corpus output path")->required();
  filter->add_option("--discard-log", log_path, "Discard log path (default <out>.discards.jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {  // --help
      return app.exit(err);
    }
    app.exit(err);
    return kUsage;
  }

  if (validate->parsed()) return cmd_validate(corpus_path);
  if (align->parsed()) return cmd_align(corpus_path, out_path, no_thinking, tokenizer_name, jobs);
  if (stats->parsed()) return cmd_stats(corpus_path, tokenizer_name);
  if (simulate->parsed()) {
    return cmd_simulate(corpus_path, traces_path, seed, barge_in_prob, stop_delay, tokenizer_name,
                        jobs);
  }
  if (evaluate->parsed()) return cmd_evaluate(traces_path, window_s, corpus_path, tokenizer_name);
  if (filter->parsed()) return cmd_filter(corpus_path, seeds_path, out_path, log_path, threshold);
  return kUsage;
}
