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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "duplexkit/tokenizer.hpp"

namespace duplexkit {

// The five node types of a thinking chain. The vocabulary is closed: a tag
// outside this set is a parse error.
enum class NodeType : std::uint8_t { Entity, Intent, Action, Knowledge, Logic };

inline constexpr NodeType kNodeTypes[] = {NodeType::Entity, NodeType::Intent, NodeType::Action,
                                          NodeType::Knowledge, NodeType::Logic};

std::string_view to_string(NodeType type);  // "ENTITY", "INTENT", ...
std::optional<NodeType> node_type_from_string(std::string_view tag);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One reasoning node. ctx_def / ctx_refs are derived from "#ctx:N" and
// "@ctx:N" markers inside the attribute text; construct nodes through
// make_node so they stay consistent with the attribute.
struct ThinkingNode {
  NodeType type = NodeType::Entity;
  std::string attribute;                       // non-empty after trimming
  std::optional<std::string> source_segment;   // "[...]" span, ANNOTATED format only
  std::optional<std::uint32_t> ctx_def;        // first "#ctx:N" marker, if any
  std::vector<std::uint32_t> ctx_refs;         // every "@ctx:N" occurrence, in order

  bool operator==(const ThinkingNode&) const = default;
};

// Trims the attribute, rejects an empty one, and scans ctx markers.
ThinkingNode make_node(NodeType type, std::string attribute,
                       std::optional<std::string> source_segment = std::nullopt);

// Ordered reasoning nodes in arrival order; possibly empty. There is no
// constraint on the type sequence.
struct ThinkingChain {
  std::vector<ThinkingNode> nodes;

  bool empty() const { return nodes.empty(); }
  std::size_t size() const { return nodes.size(); }

  bool operator==(const ThinkingChain&) const = default;
};

// ANNOTATED is the data-generation form with "[segment]{TYPE} attribute"
// lines; STREAM is the model-facing form "{TYPE} attribute" and never
// carries segment prefixes.
enum class ChainFormat : std::uint8_t { Annotated, Stream };

// One node per non-blank line; blank and whitespace-only lines are skipped.
// Line numbers in errors are 1-based over the raw input.
ThinkingChain parse_chain(std::string_view text, ChainFormat format);

// STREAM line is byte-exact: "{" + TYPE + "}" + single space + attribute.
std::string serialize_node(const ThinkingNode& node, ChainFormat format);

// One line per node, LF endings, trailing newline when non-empty.
std::string serialize_chain(const ThinkingChain& chain, ChainFormat format);

struct BindingError {
  std::size_t turn = 0;   // 0-based turn index of the dangling reference
  std::size_t node = 0;   // 0-based node index within the turn
  std::uint32_t id = 0;   // the unresolved ctx id

  bool operator==(const BindingError&) const = default;
};

// Empty result iff every "@ctx:N" in turn i resolves to a "#ctx:N"
// definition in some turn j <= i. Chains must be in turn order.
std::vector<BindingError> validate_ctx_bindings(const std::vector<ThinkingChain>& turn_chains);

// Token count of each node's STREAM line, tokenized independently per node,
// so prefix sums are exactly the token counts of retained prefixes.
std::vector<std::size_t> node_token_lengths(const ThinkingChain& chain, const Tokenizer& tokenizer);

}  // namespace duplexkit
