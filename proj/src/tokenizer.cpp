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

#include "duplexkit/tokenizer.hpp"

#include <cctype>

namespace duplexkit {

namespace {

std::uint32_t fnv1a_31(std::string_view unit) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : unit) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return static_cast<std::uint32_t>((hash ^ (hash >> 31)) & 0x7FFFFFFFu);
}

}  // namespace

std::vector<std::uint32_t> WhitespaceTokenizer::tokenize(std::string_view text) const {
  std::vector<std::uint32_t> ids;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) ids.push_back(fnv1a_31(text.substr(start, i - start)));
  }
  return ids;
}

std::vector<std::uint32_t> ByteTokenizer::tokenize(std::string_view text) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(text.size());
  for (unsigned char c : text) ids.push_back(c);
  return ids;
}

const Tokenizer* find_tokenizer(std::string_view name) {
  static const WhitespaceTokenizer whitespace;
  static const ByteTokenizer bytes;
  if (name == "whitespace") return &whitespace;
  if (name == "bytes") return &bytes;
  return nullptr;
}

std::vector<std::string> tokenizer_names() { return {"whitespace", "bytes"}; }

}  // namespace duplexkit
