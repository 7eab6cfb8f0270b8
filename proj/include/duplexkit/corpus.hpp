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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "duplexkit/alignment.hpp"
#include "duplexkit/chain.hpp"

namespace duplexkit {

// One dialogue turn: the user utterance (S frames of listening window), the
// agent response (D frames of speech span), the turn's thinking chain, and
// an optional barge-in mark.
struct Turn {
  std::string user_text;
  std::uint32_t user_frames = 1;   // S
  std::string agent_text;
  std::uint32_t agent_frames = 1;  // D
  ThinkingChain chain;
  std::optional<BargeInMark> barge_in;

  bool operator==(const Turn&) const = default;
};

struct DialogueRecord {
  std::string id;
  std::string speaker_a;
  std::string speaker_b;
  std::vector<Turn> turns;  // >= 1, sequential on the frame timeline

  bool operator==(const DialogueRecord&) const = default;
};

// A record failed schema validation. record_index is the 0-based position in
// the corpus file; field_path names the offending field, e.g.
// "turns[2].user_frames".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& message, std::size_t record_index, std::string field_path);

  std::size_t record_index() const { return record_index_; }
  const std::string& field_path() const { return field_path_; }

 private:
  std::size_t record_index_;
  std::string field_path_;
};

// Corpus files are UTF-8 line-delimited JSON, one dialogue per line, each
// record carrying "version": 1. Chains are embedded in ANNOTATED text form.
nlohmann::ordered_json dialogue_to_json(const DialogueRecord& dialogue);
DialogueRecord dialogue_from_json(const nlohmann::json& record, std::size_t record_index = 0);

std::vector<DialogueRecord> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::vector<DialogueRecord>& dialogues,
                 const std::filesystem::path& path);

// Like load_corpus but collects per-record errors instead of aborting on the
// first one. Used by corpus validation.
struct CorpusScan {
  std::vector<DialogueRecord> dialogues;
  std::vector<std::string> errors;
};
CorpusScan scan_corpus(const std::filesystem::path& path);

// Normalized Levenshtein similarity in [0, 100]:
// 100 * (maxlen - distance) / maxlen, and 100 when both strings are empty.
// Computed over bytes; symmetric; 100 iff a == b.
double similarity_ratio(std::string_view a, std::string_view b);

// The text a dialogue contributes to similarity filtering: every turn's
// user_text and agent_text, empties skipped, joined with '\n'.
std::string dialogue_full_text(const DialogueRecord& dialogue);

struct FilterDecision {
  std::string generated_id;
  std::string best_seed_id;
  double score = 0.0;
};

struct FilterResult {
  std::vector<DialogueRecord> kept;       // input order preserved
  std::vector<FilterDecision> discarded;  // one entry per dropped dialogue
  bool seeds_empty = false;               // nothing to compare against; all kept
};

// Drops a generated dialogue iff its best similarity against any seed is
// strictly greater than the threshold.
FilterResult filter_corpus(const std::vector<DialogueRecord>& generated,
                           const std::vector<DialogueRecord>& seeds, double threshold = 90.0);

// Inclusive integer range; lo == hi pins the single value.
struct IntRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
};

struct SynthSpec {
  std::size_t n_dialogues = 0;
  IntRange turns_per_dialogue{1, 4};
  IntRange user_frames{20, 80};
  IntRange agent_frames{20, 80};   // lo must be >= 2 so every turn is alignable
  IntRange chain_tokens{0, 24};    // target STREAM token count of the turn's chain
  IntRange response_words{0, 12};  // clamped to agent_frames - 2
};

// Deterministic synthetic corpus; dialogue k depends only on (seed, k).
// Generated chains always parse and every turn satisfies the alignment
// capacity precondition.
std::vector<DialogueRecord> synth_corpus(const SynthSpec& spec, std::uint64_t seed);

}  // namespace duplexkit
