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
#include <string>
#include <string_view>
#include <vector>

namespace duplexkit {

// Deterministic text -> token-id mapping. Ids are opaque non-negative
// integers; nothing downstream interprets them. tokenize("") is always [].
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::uint32_t> tokenize(std::string_view text) const = 0;
};

// Reference tokenizer: splits on whitespace runs; each unit's id is its
// FNV-1a hash folded to 31 bits. Stable across platforms and runs.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::string name() const override { return "whitespace"; }
  std::vector<std::uint32_t> tokenize(std::string_view text) const override;
};

// One token per byte, id = byte value. Useful when alignment experiments
// need long, predictable token streams.
class ByteTokenizer final : public Tokenizer {
 public:
  std::string name() const override { return "bytes"; }
  std::vector<std::uint32_t> tokenize(std::string_view text) const override;
};

// Registry used by the CLI's --tokenizer flag. Returns nullptr for unknown
// names. Built-ins: "whitespace" (default), "bytes".
const Tokenizer* find_tokenizer(std::string_view name);
std::vector<std::string> tokenizer_names();

}  // namespace duplexkit
