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
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duplexkit/chain.hpp"

namespace duplexkit {

// Ordered keyword -> node-type mapping; earlier entries win. Keywords are
// matched against lowercased words with punctuation stripped.
using Lexicon = std::vector<std::pair<std::string, NodeType>>;

// Entity word -> retrievable fact, for appended KNOWLEDGE nodes.
using KnowledgeTable = std::vector<std::pair<std::string, std::string>>;

const Lexicon& default_lexicon();
const KnowledgeTable& default_knowledge_table();

// Deterministic keyword-driven chain construction: the turn text is split
// into segments at punctuation and at words that hit a different lexicon
// type than the current segment; each typed segment becomes one node (with
// the segment as its ANNOTATED source span), and a KNOWLEDGE node is
// appended per knowledge-table hit. Segments with no hit and no
// date/number/proper-noun pattern emit nothing.
ThinkingChain rule_based_chain(std::string_view turn_text, const Lexicon& lexicon,
                               const KnowledgeTable& knowledge);

struct GenerationRequest {
  std::string dialogue_id;
  std::size_t turn_index = 0;
  std::string turn_text;
  std::string context;  // prior dialogue text, implementation-defined use
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Produces one ANNOTATED-format chain per dialogue turn.
class ChainGenerator {
 public:
  virtual ~ChainGenerator() = default;

  virtual ThinkingChain generate(const GenerationRequest& request) = 0;
};

// rule_based_chain plus cross-turn entity binding: the first time an entity
// segment appears its ENTITY node gets a "#ctx:N" definition, later turns
// mentioning it reference "@ctx:N". State is per-dialogue; call reset()
// between dialogues.
class RuleBasedGenerator final : public ChainGenerator {
 public:
  RuleBasedGenerator() : RuleBasedGenerator(default_lexicon(), default_knowledge_table()) {}
  RuleBasedGenerator(Lexicon lexicon, KnowledgeTable knowledge)
      : lexicon_(std::move(lexicon)), knowledge_(std::move(knowledge)) {}

  ThinkingChain generate(const GenerationRequest& request) override;
  void reset();

 private:
  Lexicon lexicon_;
  KnowledgeTable knowledge_;
  std::map<std::string, std::uint32_t> entity_ctx_;  // normalized entity -> ctx id
  std::uint32_t next_ctx_id_ = 1;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One round trip to a remote generation endpoint; request and response
// bodies are JSON text. Implementations throw TransportError on failure.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual std::string post(const std::string& request_body) = 0;
};

struct EndpointConfig {
  std::string url;         // e.g. "http://host:8080/generate"
  std::string auth_token;  // optional; sent as a bearer token
  int max_attempts = 3;
  double backoff_base_s = 0.5;  // doubled per retry
};

// JSON config file: {"url": ..., "auth_token"?: ..., "max_attempts"?: ...,
// "backoff_base_s"?: ...}.
EndpointConfig load_endpoint_config(const std::filesystem::path& path);

// Remote chain generation. Wire format: request {"turn_text", "context",
// "format": "ANNOTATED"}, response {"chain_text"}. Responses that do not
// parse as ANNOTATED chains are rejected and logged, never repaired.
// Requests are idempotent per (dialogue_id, turn_index): repeats are served
// from a local cache without hitting the transport again.
class ExternalChainClient final : public ChainGenerator {
 public:
  ExternalChainClient(Transport& transport, EndpointConfig config);

  ThinkingChain generate(const GenerationRequest& request) override;

  // Test seam: replaces the inter-retry sleep. Receives the delay seconds.
  void set_sleep_hook(std::function<void(double)> hook);

  const std::vector<std::string>& rejected_log() const { return rejected_log_; }

 private:
  Transport& transport_;
  EndpointConfig config_;
  std::function<void(double)> sleep_;
  std::map<std::string, std::string> cache_;  // request key -> validated chain text
  std::vector<std::string> rejected_log_;
};

// cpp-httplib POST transport for an http:// endpoint.
std::unique_ptr<Transport> make_http_transport(const EndpointConfig& config);

}  // namespace duplexkit
