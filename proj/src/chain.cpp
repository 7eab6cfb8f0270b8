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

#include "duplexkit/chain.hpp"

#include <cctype>
#include <unordered_set>

namespace duplexkit {

namespace {

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

// Parses the decimal id after a "#ctx:"/"@ctx:" marker; the id ends at the
// first non-digit. Returns nullopt when no digits follow.
std::optional<std::uint32_t> ctx_id_at(std::string_view text, std::size_t digits_begin) {
  std::uint64_t id = 0;
  std::size_t i = digits_begin;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    id = id * 10 + static_cast<std::uint64_t>(text[i] - '0');
    if (id > 0xFFFFFFFFull) return std::nullopt;
    ++i;
  }
  if (i == digits_begin) return std::nullopt;
  return static_cast<std::uint32_t>(id);
}

void scan_ctx_markers(ThinkingNode& node) {
  const std::string_view attr = node.attribute;
  for (std::size_t pos = 0; (pos = attr.find("ctx:", pos)) != std::string_view::npos; ++pos) {
    if (pos == 0) continue;
    const char marker = attr[pos - 1];
    if (marker != '@' && marker != '#') continue;
    auto id = ctx_id_at(attr, pos + 4);
    if (!id) continue;
    if (marker == '@') {
      node.ctx_refs.push_back(*id);
    } else if (!node.ctx_def) {
      node.ctx_def = *id;
    }
  }
}

}  // namespace

std::string_view to_string(NodeType type) {
  switch (type) {
    case NodeType::Entity: return "ENTITY";
    case NodeType::Intent: return "INTENT";
    case NodeType::Action: return "ACTION";
    case NodeType::Knowledge: return "KNOWLEDGE";
    case NodeType::Logic: return "LOGIC";
  }
  return "?";
}

std::optional<NodeType> node_type_from_string(std::string_view tag) {
  if (tag == "ENTITY") return NodeType::Entity;
  if (tag == "INTENT") return NodeType::Intent;
  if (tag == "ACTION") return NodeType::Action;
  if (tag == "KNOWLEDGE") return NodeType::Knowledge;
  if (tag == "LOGIC") return NodeType::Logic;
  return std::nullopt;
}

ThinkingNode make_node(NodeType type, std::string attribute,
                       std::optional<std::string> source_segment) {
  ThinkingNode node;
  node.type = type;
  node.attribute = std::string(trim(attribute));
  node.source_segment = std::move(source_segment);
  if (node.attribute.empty()) {
    throw std::invalid_argument("make_node: attribute must be non-empty");
  }
  scan_ctx_markers(node);
  return node;
}

ThinkingChain parse_chain(std::string_view text, ChainFormat format) {
  ThinkingChain chain;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

    std::string_view line = trim(raw);
    if (line.empty()) continue;

    std::optional<std::string> segment;
    if (format == ChainFormat::Annotated && line.front() == '[') {
      std::size_t close = line.find(']');
      if (close == std::string_view::npos) {
        throw ParseError("unclosed '[' in source segment", line_no);
      }
      segment = std::string(line.substr(1, close - 1));
      line = trim(line.substr(close + 1));
    }

    if (line.empty() || line.front() != '{') {
      throw ParseError("missing '{...}' node type tag", line_no);
    }
    std::size_t close = line.find('}');
    if (close == std::string_view::npos) {
      throw ParseError("unclosed '{' in node type tag", line_no);
    }
    std::string_view tag = line.substr(1, close - 1);
    auto type = node_type_from_string(tag);
    if (!type) {
      throw ParseError("unknown node type \"" + std::string(tag) + "\"", line_no);
    }
    std::string_view attribute = trim(line.substr(close + 1));
    if (attribute.empty()) {
      throw ParseError("empty node attribute", line_no);
    }
    chain.nodes.push_back(make_node(*type, std::string(attribute), std::move(segment)));
  }
  return chain;
}

std::string serialize_node(const ThinkingNode& node, ChainFormat format) {
  std::string line;
  if (format == ChainFormat::Annotated && node.source_segment) {
    line += '[';
    line += *node.source_segment;
    line += ']';
  }
  line += '{';
  line += to_string(node.type);
  line += "} ";
  line += node.attribute;
  return line;
}

std::string serialize_chain(const ThinkingChain& chain, ChainFormat format) {
  std::string out;
  for (const ThinkingNode& node : chain.nodes) {
    out += serialize_node(node, format);
    out += '\n';
  }
  return out;
}

std::vector<BindingError> validate_ctx_bindings(const std::vector<ThinkingChain>& turn_chains) {
  std::vector<BindingError> errors;
  std::unordered_set<std::uint32_t> defined;
  for (std::size_t turn = 0; turn < turn_chains.size(); ++turn) {
    // All definitions of a turn are visible to references in the same turn.
    for (const ThinkingNode& node : turn_chains[turn].nodes) {
      if (node.ctx_def) defined.insert(*node.ctx_def);
    }
    for (std::size_t node_idx = 0; node_idx < turn_chains[turn].nodes.size(); ++node_idx) {
      for (std::uint32_t ref : turn_chains[turn].nodes[node_idx].ctx_refs) {
        if (!defined.contains(ref)) {
          errors.push_back(BindingError{turn, node_idx, ref});
        }
      }
    }
  }
  return errors;
}

std::vector<std::size_t> node_token_lengths(const ThinkingChain& chain,
                                            const Tokenizer& tokenizer) {
  std::vector<std::size_t> lengths;
  lengths.reserve(chain.size());
  for (const ThinkingNode& node : chain.nodes) {
    lengths.push_back(tokenizer.tokenize(serialize_node(node, ChainFormat::Stream)).size());
  }
  return lengths;
}

}  // namespace duplexkit
