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

#include "duplexkit/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "duplexkit/random.hpp"

namespace duplexkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_fail(std::size_t record, const std::string& path,
                              const std::string& what) {
  throw SchemaError(what, record, path);
}

std::uint32_t require_positive_u32(const json& value, std::size_t record,
                                   const std::string& path) {
  if (!value.is_number_unsigned() && !value.is_number_integer()) {
    schema_fail(record, path, "expected a positive integer");
  }
  const std::int64_t v = value.get<std::int64_t>();
  if (v < 1 || v > 0xFFFFFFFFll) {
    schema_fail(record, path, "expected a positive integer");
  }
  return static_cast<std::uint32_t>(v);
}

std::string require_string(const json& obj, const char* key, std::size_t record,
                           const std::string& prefix) {
  if (!obj.contains(key)) schema_fail(record, prefix + key, "missing field");
  if (!obj.at(key).is_string()) schema_fail(record, prefix + key, "expected a string");
  return obj.at(key).get<std::string>();
}

}  // namespace

SchemaError::SchemaError(const std::string& message, std::size_t record_index,
                         std::string field_path)
    : std::runtime_error("record " + std::to_string(record_index) + ", field " + field_path +
                         ": " + message),
      record_index_(record_index),
      field_path_(std::move(field_path)) {}

ordered_json dialogue_to_json(const DialogueRecord& dialogue) {
  ordered_json record;
  record["version"] = 1;
  record["id"] = dialogue.id;
  record["speaker_a"] = dialogue.speaker_a;
  record["speaker_b"] = dialogue.speaker_b;
  record["turns"] = ordered_json::array();
  for (const Turn& turn : dialogue.turns) {
    ordered_json jt;
    jt["user_text"] = turn.user_text;
    jt["user_frames"] = turn.user_frames;
    jt["agent_text"] = turn.agent_text;
    jt["agent_frames"] = turn.agent_frames;
    jt["chain"] = serialize_chain(turn.chain, ChainFormat::Annotated);
    if (turn.barge_in) {
      jt["barge_in"] = {{"cut_frame", turn.barge_in->cut_frame},
                        {"stop_delay_frames", turn.barge_in->stop_delay_frames}};
    } else {
      jt["barge_in"] = nullptr;
    }
    record["turns"].push_back(std::move(jt));
  }
  return record;
}

DialogueRecord dialogue_from_json(const json& record, std::size_t record_index) {
  if (!record.is_object()) schema_fail(record_index, "(record)", "expected a JSON object");
  if (!record.contains("version")) schema_fail(record_index, "version", "missing field");
  if (!record.at("version").is_number_integer() || record.at("version").get<int>() != 1) {
    schema_fail(record_index, "version", "unsupported schema version");
  }

  DialogueRecord dialogue;
  dialogue.id = require_string(record, "id", record_index, "");
  dialogue.speaker_a = require_string(record, "speaker_a", record_index, "");
  dialogue.speaker_b = require_string(record, "speaker_b", record_index, "");

  if (!record.contains("turns") || !record.at("turns").is_array()) {
    schema_fail(record_index, "turns", "missing or non-array field");
  }
  const json& turns = record.at("turns");
  if (turns.empty()) schema_fail(record_index, "turns", "dialogue must have at least one turn");

  for (std::size_t i = 0; i < turns.size(); ++i) {
    const std::string prefix = "turns[" + std::to_string(i) + "].";
    const json& jt = turns.at(i);
    if (!jt.is_object()) schema_fail(record_index, prefix, "expected a JSON object");

    Turn turn;
    turn.user_text = require_string(jt, "user_text", record_index, prefix);
    turn.agent_text = require_string(jt, "agent_text", record_index, prefix);
    if (!jt.contains("user_frames")) schema_fail(record_index, prefix + "user_frames", "missing field");
    turn.user_frames = require_positive_u32(jt.at("user_frames"), record_index, prefix + "user_frames");
    if (!jt.contains("agent_frames")) schema_fail(record_index, prefix + "agent_frames", "missing field");
    turn.agent_frames =
        require_positive_u32(jt.at("agent_frames"), record_index, prefix + "agent_frames");

    const std::string chain_text = require_string(jt, "chain", record_index, prefix);
    try {
      turn.chain = parse_chain(chain_text, ChainFormat::Annotated);
    } catch (const ParseError& err) {
      schema_fail(record_index, prefix + "chain", err.what());
    }

    if (jt.contains("barge_in") && !jt.at("barge_in").is_null()) {
      const json& jb = jt.at("barge_in");
      if (!jb.is_object()) schema_fail(record_index, prefix + "barge_in", "expected object or null");
      BargeInMark mark;
      if (!jb.contains("cut_frame")) {
        schema_fail(record_index, prefix + "barge_in.cut_frame", "missing field");
      }
      mark.cut_frame = require_positive_u32(jb.at("cut_frame"), record_index,
                                            prefix + "barge_in.cut_frame");
      if (jb.contains("stop_delay_frames")) {
        if (!jb.at("stop_delay_frames").is_number_integer() &&
            !jb.at("stop_delay_frames").is_number_unsigned()) {
          schema_fail(record_index, prefix + "barge_in.stop_delay_frames",
                      "expected a non-negative integer");
        }
        const std::int64_t v = jb.at("stop_delay_frames").get<std::int64_t>();
        if (v < 0 || v > 0xFFFFFFFFll) {
          schema_fail(record_index, prefix + "barge_in.stop_delay_frames",
                      "expected a non-negative integer");
        }
        mark.stop_delay_frames = static_cast<std::uint32_t>(v);
      }
      if (mark.cut_frame >= turn.agent_frames) {
        schema_fail(record_index, prefix + "barge_in.cut_frame",
                    "must be smaller than agent_frames");
      }
      turn.barge_in = mark;
    }
    dialogue.turns.push_back(std::move(turn));
  }
  return dialogue;
}

std::vector<DialogueRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  std::vector<DialogueRecord> dialogues;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& err) {
      throw SchemaError(std::string("invalid JSON: ") + err.what(), index, "(record)");
    }
    dialogues.push_back(dialogue_from_json(record, index));
    ++index;
  }
  return dialogues;
}

void save_corpus(const std::vector<DialogueRecord>& dialogues,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path.string());
  }
  for (const DialogueRecord& dialogue : dialogues) {
    out << dialogue_to_json(dialogue).dump() << '\n';
  }
}

CorpusScan scan_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  CorpusScan scan;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      scan.dialogues.push_back(dialogue_from_json(json::parse(line), index));
    } catch (const std::exception& err) {
      scan.errors.push_back("record " + std::to_string(index) + ": " + err.what());
    }
    ++index;
  }
  return scan;
}

double similarity_ratio(std::string_view a, std::string_view b) {
  const std::size_t maxlen = std::max(a.size(), b.size());
  if (maxlen == 0) return 100.0;
  if (a == b) return 100.0;

  // Two-row Levenshtein; unit costs for insert, delete, substitute.
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  const std::size_t dist = prev[b.size()];
  // (100 * k) / maxlen keeps round scores like 90.0 exact.
  return (100.0 * static_cast<double>(maxlen - dist)) / static_cast<double>(maxlen);
}

std::string dialogue_full_text(const DialogueRecord& dialogue) {
  std::string text;
  for (const Turn& turn : dialogue.turns) {
    for (const std::string* part : {&turn.user_text, &turn.agent_text}) {
      if (part->empty()) continue;
      if (!text.empty()) text += '\n';
      text += *part;
    }
  }
  return text;
}

FilterResult filter_corpus(const std::vector<DialogueRecord>& generated,
                           const std::vector<DialogueRecord>& seeds, double threshold) {
  if (threshold < 0.0 || threshold > 100.0) {
    throw std::invalid_argument("filter_corpus: threshold must lie in [0, 100]");
  }
  FilterResult result;
  if (seeds.empty()) {
    result.kept = generated;
    result.seeds_empty = true;
    return result;
  }

  std::vector<std::string> seed_texts;
  seed_texts.reserve(seeds.size());
  for (const DialogueRecord& seed : seeds) seed_texts.push_back(dialogue_full_text(seed));

  for (const DialogueRecord& candidate : generated) {
    const std::string text = dialogue_full_text(candidate);
    double best = -1.0;
    std::size_t best_seed = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const double score = similarity_ratio(text, seed_texts[s]);
      if (score > best) {
        best = score;
        best_seed = s;
      }
    }
    if (best > threshold) {
      result.discarded.push_back(FilterDecision{candidate.id, seeds[best_seed].id, best});
    } else {
      result.kept.push_back(candidate);
    }
  }
  return result;
}

namespace {

const char* const kWords[] = {
    "table",  "booking", "evening", "seven",   "guests",  "menu",    "window", "quiet",
    "corner", "music",   "city",    "museum",  "ticket",  "train",   "hotel",  "river",
    "coffee", "garden",  "market",  "cheese",  "bread",   "summer",  "winter", "morning",
    "friday", "sunday",  "double",  "room",    "view",    "price",   "offer",  "phone",
    "number", "street",  "bridge",  "light",   "early",   "late",    "large",  "small",
};
constexpr std::size_t kWordCount = sizeof(kWords) / sizeof(kWords[0]);

std::string random_words(PortableRng& rng, std::size_t count) {
  std::string text;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) text += ' ';
    text += kWords[rng.next_below(kWordCount)];
  }
  return text;
}

std::uint32_t sample(PortableRng& rng, const IntRange& range) {
  if (range.lo > range.hi) {
    throw std::invalid_argument("synth_corpus: range lo must not exceed hi");
  }
  return static_cast<std::uint32_t>(rng.next_in(range.lo, range.hi));
}

// Builds a chain whose STREAM token count under the whitespace tokenizer is
// exactly `target` (a node line of k attribute words tokenizes to k + 1).
// Targets of 0 or 1 yield the empty chain; a single token cannot carry a tag
// plus a non-empty attribute.
ThinkingChain random_chain(PortableRng& rng, std::uint64_t target) {
  ThinkingChain chain;
  if (target < 2) return chain;
  std::uint64_t remaining = target;
  while (remaining >= 2) {
    std::uint64_t size = std::min<std::uint64_t>(rng.next_in(2, 6), remaining);
    if (remaining - size == 1) {
      size = (size + 1 <= remaining) ? size + 1 : remaining;
    }
    const NodeType type = kNodeTypes[rng.next_below(5)];
    chain.nodes.push_back(make_node(type, random_words(rng, static_cast<std::size_t>(size - 1))));
    remaining -= size;
  }
  return chain;
}

}  // namespace

std::vector<DialogueRecord> synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n_dialogues > 0 && spec.agent_frames.lo < 2) {
    throw std::invalid_argument("synth_corpus: agent_frames.lo must be >= 2");
  }
  std::vector<DialogueRecord> dialogues;
  dialogues.reserve(spec.n_dialogues);
  for (std::size_t k = 0; k < spec.n_dialogues; ++k) {
    PortableRng rng(derive_stream_seed(seed, k));
    DialogueRecord dialogue;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%06zu", k);
    dialogue.id = id;
    dialogue.speaker_a = "user";
    dialogue.speaker_b = "agent";

    const std::uint32_t n_turns = std::max<std::uint32_t>(1, sample(rng, spec.turns_per_dialogue));
    for (std::uint32_t t = 0; t < n_turns; ++t) {
      Turn turn;
      turn.user_frames = std::max<std::uint32_t>(1, sample(rng, spec.user_frames));
      turn.agent_frames = std::max<std::uint32_t>(2, sample(rng, spec.agent_frames));
      turn.user_text = random_words(rng, rng.next_in(3, 8));
      const std::uint32_t words =
          std::min<std::uint32_t>(sample(rng, spec.response_words), turn.agent_frames - 2);
      turn.agent_text = random_words(rng, words);
      turn.chain = random_chain(rng, sample(rng, spec.chain_tokens));
      dialogue.turns.push_back(std::move(turn));
    }
    dialogues.push_back(std::move(dialogue));
  }
  return dialogues;
}

}  // namespace duplexkit
