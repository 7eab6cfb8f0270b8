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

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "duplexkit/chain.hpp"
#include "duplexkit/corpus.hpp"

namespace testutil {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "alpha", "bravo",  "charlie", "delta", "echo",  "foxtrot", "golf",   "hotel",
      "india", "juliet", "kilo",    "lima",  "mike",  "november", "oscar", "papa",
      "quebec", "romeo", "sierra",  "tango", "uniform", "victor", "whiskey", "xray",
  };
  return words;
}

struct ChainGenOptions {
  bool with_segments = false;
  bool with_ctx_markers = false;
  std::size_t max_nodes = 6;
  std::size_t max_attr_words = 6;
};

// Random but always-valid chain; attributes have no leading/trailing
// whitespace, segments contain no ']'.
inline duplexkit::ThinkingChain random_chain(std::mt19937_64& rng, const ChainGenOptions& opts) {
  using namespace duplexkit;
  ThinkingChain chain;
  const auto& words = word_pool();
  const std::size_t n_nodes = rng() % (opts.max_nodes + 1);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const NodeType type = kNodeTypes[rng() % 5];
    std::string attribute;
    const std::size_t n_words = 1 + rng() % opts.max_attr_words;
    for (std::size_t w = 0; w < n_words; ++w) {
      if (w > 0) attribute += ' ';
      attribute += words[rng() % words.size()];
    }
    if (opts.with_ctx_markers && rng() % 4 == 0) {
      attribute += (rng() % 2 == 0 ? " #ctx:" : " @ctx:") + std::to_string(rng() % 10);
    }
    std::optional<std::string> segment;
    if (opts.with_segments && rng() % 2 == 0) {
      segment = words[rng() % words.size()] + " " + words[rng() % words.size()];
    }
    chain.nodes.push_back(make_node(type, std::move(attribute), std::move(segment)));
  }
  return chain;
}

// A one-dialogue corpus with explicit frame counts; chain left empty.
inline duplexkit::DialogueRecord simple_dialogue(const std::string& id,
                                                 std::vector<duplexkit::Turn> turns) {
  duplexkit::DialogueRecord dialogue;
  dialogue.id = id;
  dialogue.speaker_a = "user";
  dialogue.speaker_b = "agent";
  dialogue.turns = std::move(turns);
  return dialogue;
}

inline duplexkit::Turn simple_turn(std::uint32_t user_frames, std::uint32_t agent_frames,
                                   const std::string& agent_text = "ok then",
                                   const std::string& user_text = "please help") {
  duplexkit::Turn turn;
  turn.user_text = user_text;
  turn.user_frames = user_frames;
  turn.agent_text = agent_text;
  turn.agent_frames = agent_frames;
  return turn;
}

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    path_ = base / ("duplexkit-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
