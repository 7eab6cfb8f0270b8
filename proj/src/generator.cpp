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

#include "duplexkit/generator.hpp"

#include <cctype>
#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace duplexkit {

namespace {

std::string normalize_word(std::string_view word) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && !std::isalnum(static_cast<unsigned char>(word[begin]))) ++begin;
  while (end > begin && !std::isalnum(static_cast<unsigned char>(word[end - 1]))) --end;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(word[i])));
  }
  return out;
}

bool ends_sentence(std::string_view word) {
  return !word.empty() && (word.back() == '.' || word.back() == '?' || word.back() == '!' ||
                           word.back() == ';' || word.back() == ',');
}

bool has_digit(std::string_view word) {
  for (char c : word) {
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

bool is_capitalized(std::string_view word) {
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return std::isupper(static_cast<unsigned char>(c));
    }
  }
  return false;
}

// Short function words that read better at the head of the next segment
// than at the tail of the previous one.
bool is_connective(const std::string& normalized) {
  static const char* const kConnectives[] = {"to", "and", "but", "or", "for", "with", "this",
                                             "that", "a", "the", "so", "then"};
  for (const char* c : kConnectives) {
    if (normalized == c) return true;
  }
  return false;
}

const char* attribute_prefix(NodeType type) {
  switch (type) {
    case NodeType::Intent: return "Goal: ";
    case NodeType::Action: return "Next step: ";
    case NodeType::Logic: return "Reason: ";
    case NodeType::Entity: return "Noted: ";
    case NodeType::Knowledge: return "";  // knowledge nodes carry "<Entity>: <fact>"
  }
  return "";
}

std::string capitalize(std::string word) {
  if (!word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

struct SegmentNode {
  NodeType type;
  std::string segment;         // cleaned source words
  std::string normalized_key;  // lowercased segment, for entity tracking
};

// Splits the text into typed segments; the shared core of rule_based_chain
// and RuleBasedGenerator.
std::vector<SegmentNode> segment_text(std::string_view text, const Lexicon& lexicon) {
  if (lexicon.empty()) {
    throw std::invalid_argument("rule_based_chain: lexicon must be non-empty");
  }

  // Whitespace-split, keeping raw words for pattern checks.
  std::vector<std::string> raw;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) raw.emplace_back(text.substr(start, i - start));
  }

  std::vector<SegmentNode> out;
  std::vector<std::string> words;     // cleaned words of the open segment
  std::vector<std::string> keys;      // their normalized forms
  std::optional<NodeType> open_type;

  auto lexicon_type = [&](const std::string& normalized) -> std::optional<NodeType> {
    for (const auto& [keyword, type] : lexicon) {
      if (normalized == keyword) return type;
    }
    return std::nullopt;
  };

  auto close_segment = [&]() {
    if (!words.empty() && open_type) {
      SegmentNode node;
      node.type = *open_type;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) node.segment += ' ';
        node.segment += words[w];
        if (w > 0) node.normalized_key += ' ';
        node.normalized_key += keys[w];
      }
      out.push_back(std::move(node));
    }
    words.clear();
    keys.clear();
    open_type.reset();
  };

  bool sentence_start = true;
  for (std::size_t w = 0; w < raw.size(); ++w) {
    const std::string& word = raw[w];
    const std::string normalized = normalize_word(word);
    if (normalized.empty()) {
      sentence_start = ends_sentence(word) || sentence_start;
      continue;
    }

    std::optional<NodeType> hit = lexicon_type(normalized);
    if (!hit && (has_digit(word) || (is_capitalized(word) && !sentence_start))) {
      hit = NodeType::Entity;
    }

    if (hit && open_type && *hit != *open_type) {
      // Carry trailing connectives into the new segment.
      std::vector<std::string> carried_words;
      std::vector<std::string> carried_keys;
      while (!words.empty() && is_connective(keys.back())) {
        carried_words.insert(carried_words.begin(), words.back());
        carried_keys.insert(carried_keys.begin(), keys.back());
        words.pop_back();
        keys.pop_back();
      }
      close_segment();
      words = std::move(carried_words);
      keys = std::move(carried_keys);
    }

    std::string cleaned = word;
    while (!cleaned.empty() && ends_sentence(cleaned)) cleaned.pop_back();
    if (cleaned.empty()) cleaned = normalized;
    words.push_back(cleaned);
    keys.push_back(normalized);
    if (hit && !open_type) open_type = *hit;

    if (ends_sentence(word)) {
      close_segment();
      sentence_start = true;
    } else {
      sentence_start = false;
    }
  }
  close_segment();
  return out;
}

std::vector<std::pair<std::string, std::string>> knowledge_hits(std::string_view text,
                                                                const KnowledgeTable& knowledge) {
  std::vector<std::pair<std::string, std::string>> hits;
  std::size_t i = 0;
  std::vector<std::string> seen;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    const std::string normalized = normalize_word(text.substr(start, i - start));
    for (const auto& [entity, fact] : knowledge) {
      if (normalized != entity) continue;
      bool already = false;
      for (const std::string& s : seen) already = already || s == entity;
      if (!already) {
        seen.push_back(entity);
        hits.emplace_back(entity, fact);
      }
    }
  }
  return hits;
}

ThinkingChain build_chain(std::string_view turn_text, const Lexicon& lexicon,
                          const KnowledgeTable& knowledge,
                          std::map<std::string, std::uint32_t>* entity_ctx,
                          std::uint32_t* next_ctx_id) {
  ThinkingChain chain;
  for (SegmentNode& seg : segment_text(turn_text, lexicon)) {
    std::string attribute = attribute_prefix(seg.type) + seg.segment;
    if (seg.type == NodeType::Entity && entity_ctx != nullptr) {
      auto it = entity_ctx->find(seg.normalized_key);
      if (it == entity_ctx->end()) {
        const std::uint32_t id = (*next_ctx_id)++;
        entity_ctx->emplace(seg.normalized_key, id);
        attribute += " #ctx:" + std::to_string(id);
      } else {
        attribute += " @ctx:" + std::to_string(it->second);
      }
    }
    chain.nodes.push_back(make_node(seg.type, std::move(attribute), std::move(seg.segment)));
  }
  for (const auto& [entity, fact] : knowledge_hits(turn_text, knowledge)) {
    chain.nodes.push_back(make_node(NodeType::Knowledge, capitalize(entity) + ": " + fact));
  }
  return chain;
}

}  // namespace

const Lexicon& default_lexicon() {
  static const Lexicon lexicon = {
      {"help", NodeType::Intent},     {"please", NodeType::Intent},
      {"need", NodeType::Intent},     {"want", NodeType::Intent},
      {"wondering", NodeType::Intent},{"question", NodeType::Intent},
      {"looking", NodeType::Intent},
      {"order", NodeType::Action},    {"book", NodeType::Action},
      {"reserve", NodeType::Action},  {"schedule", NodeType::Action},
      {"buy", NodeType::Action},      {"call", NodeType::Action},
      {"send", NodeType::Action},     {"cancel", NodeType::Action},
      {"find", NodeType::Action},     {"check", NodeType::Action},
      {"celebrate", NodeType::Logic}, {"because", NodeType::Logic},
      {"since", NodeType::Logic},     {"therefore", NodeType::Logic},
      {"reason", NodeType::Logic},    {"prefer", NodeType::Logic},
      {"weekend", NodeType::Entity},  {"today", NodeType::Entity},
      {"tomorrow", NodeType::Entity}, {"tonight", NodeType::Entity},
      {"monday", NodeType::Entity},   {"tuesday", NodeType::Entity},
      {"wednesday", NodeType::Entity},{"thursday", NodeType::Entity},
      {"friday", NodeType::Entity},   {"saturday", NodeType::Entity},
      {"sunday", NodeType::Entity},
  };
  return lexicon;
}

const KnowledgeTable& default_knowledge_table() {
  static const KnowledgeTable knowledge = {
      {"birthday", "Decorations, discounts, or special perks"},
      {"anniversary", "Couples menus or complimentary dessert"},
      {"allergy", "Kitchens can usually adapt dishes on request"},
  };
  return knowledge;
}

ThinkingChain rule_based_chain(std::string_view turn_text, const Lexicon& lexicon,
                               const KnowledgeTable& knowledge) {
  return build_chain(turn_text, lexicon, knowledge, nullptr, nullptr);
}

ThinkingChain RuleBasedGenerator::generate(const GenerationRequest& request) {
  return build_chain(request.turn_text, lexicon_, knowledge_, &entity_ctx_, &next_ctx_id_);
}

void RuleBasedGenerator::reset() {
  entity_ctx_.clear();
  next_ctx_id_ = 1;
}

EndpointConfig load_endpoint_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open endpoint config: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error("invalid endpoint config: " + std::string(err.what()));
  }
  EndpointConfig config;
  if (!doc.contains("url") || !doc.at("url").is_string()) {
    throw std::runtime_error("endpoint config: missing \"url\"");
  }
  config.url = doc.at("url").get<std::string>();
  if (doc.contains("auth_token")) config.auth_token = doc.at("auth_token").get<std::string>();
  if (doc.contains("max_attempts")) config.max_attempts = doc.at("max_attempts").get<int>();
  if (doc.contains("backoff_base_s")) {
    config.backoff_base_s = doc.at("backoff_base_s").get<double>();
  }
  if (config.max_attempts < 1) {
    throw std::runtime_error("endpoint config: max_attempts must be >= 1");
  }
  return config;
}

ExternalChainClient::ExternalChainClient(Transport& transport, EndpointConfig config)
    : transport_(transport), config_(std::move(config)) {
  sleep_ = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

void ExternalChainClient::set_sleep_hook(std::function<void(double)> hook) {
  sleep_ = std::move(hook);
}

ThinkingChain ExternalChainClient::generate(const GenerationRequest& request) {
  const std::string key = request.dialogue_id + "#" + std::to_string(request.turn_index);
  if (auto it = cache_.find(key); it != cache_.end()) {
    return parse_chain(it->second, ChainFormat::Annotated);
  }

  nlohmann::ordered_json body;
  body["turn_text"] = request.turn_text;
  body["context"] = request.context;
  body["format"] = "ANNOTATED";

  std::string response;
  std::string last_error;
  bool ok = false;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    try {
      response = transport_.post(body.dump());
      ok = true;
      break;
    } catch (const TransportError& err) {
      last_error = err.what();
      if (attempt < config_.max_attempts) {
        sleep_(config_.backoff_base_s * static_cast<double>(1u << (attempt - 1)));
      }
    }
  }
  if (!ok) {
    throw GenerationError("transport failed after " + std::to_string(config_.max_attempts) +
                          " attempts: " + last_error);
  }

  std::string chain_text;
  try {
    nlohmann::json doc = nlohmann::json::parse(response);
    chain_text = doc.at("chain_text").get<std::string>();
  } catch (const std::exception& err) {
    rejected_log_.push_back(key + ": malformed response: " + err.what());
    throw GenerationError("malformed generation response for " + key);
  }

  try {
    ThinkingChain chain = parse_chain(chain_text, ChainFormat::Annotated);
    cache_.emplace(key, chain_text);
    return chain;
  } catch (const ParseError& err) {
    rejected_log_.push_back(key + ": invalid chain: " + err.what());
    throw GenerationError("generated chain for " + key + " rejected: " + err.what());
  }
}

namespace {

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const EndpointConfig& config) {
    // Split "http://host[:port]/path" into base and path.
    const std::string& url = config.url;
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
      throw std::invalid_argument("HttpTransport: url must start with http://");
    }
    std::size_t slash = url.find('/', scheme + 3);
    base_ = (slash == std::string::npos) ? url : url.substr(0, slash);
    path_ = (slash == std::string::npos) ? "/" : url.substr(slash);
    token_ = config.auth_token;
  }

  std::string post(const std::string& request_body) override {
    httplib::Client client(base_);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto result = client.Post(path_, headers, request_body, "application/json");
    if (!result) {
      throw TransportError("http transport: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
      throw TransportError("http transport: status " + std::to_string(result->status));
    }
    return result->body;
  }

 private:
  std::string base_;
  std::string path_;
  std::string token_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const EndpointConfig& config) {
  return std::make_unique<HttpTransport>(config);
}

}  // namespace duplexkit
