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
#include <string>
#include <string_view>
#include <variant>

namespace duplexkit {

// Control symbols of the agent text channel. In every text-visible format
// they appear as the literal strings "<SIL>", "<BOS>", "<EOS>", "<PAD>",
// "<BOC>", "<EOC>".
enum class ControlToken : std::uint8_t { Sil, Bos, Eos, Pad, Boc, Eoc };

std::string_view to_string(ControlToken token);
std::optional<ControlToken> control_token_from_string(std::string_view text);

// One slot of the agent text channel: either a control symbol or an opaque
// non-negative text-token id supplied by a Tokenizer. The two spaces never
// overlap.
class AgentTextToken {
 public:
  AgentTextToken() : value_(ControlToken::Sil) {}

  static AgentTextToken control(ControlToken kind) { return AgentTextToken(kind); }
  static AgentTextToken text(std::uint32_t id) { return AgentTextToken(id); }

  static AgentTextToken sil() { return control(ControlToken::Sil); }
  static AgentTextToken bos() { return control(ControlToken::Bos); }
  static AgentTextToken eos() { return control(ControlToken::Eos); }
  static AgentTextToken pad() { return control(ControlToken::Pad); }
  static AgentTextToken boc() { return control(ControlToken::Boc); }
  static AgentTextToken eoc() { return control(ControlToken::Eoc); }

  bool is_control() const { return std::holds_alternative<ControlToken>(value_); }
  bool is_control(ControlToken kind) const {
    return is_control() && std::get<ControlToken>(value_) == kind;
  }
  bool is_text() const { return !is_control(); }

  ControlToken control_kind() const { return std::get<ControlToken>(value_); }
  std::uint32_t text_id() const { return std::get<std::uint32_t>(value_); }

  bool operator==(const AgentTextToken&) const = default;

 private:
  explicit AgentTextToken(ControlToken kind) : value_(kind) {}
  explicit AgentTextToken(std::uint32_t id) : value_(id) {}

  std::variant<ControlToken, std::uint32_t> value_;
};

// "<SIL>" for control tokens, the decimal id for text tokens.
std::string to_string(const AgentTextToken& token);
std::optional<AgentTextToken> agent_token_from_string(std::string_view text);

// The 12.5 Hz frame clock; one frame is an 80 ms tick. Both quantities are
// stored and their product must be exactly 1.0.
class FrameClock {
 public:
  FrameClock() : FrameClock(12.5, 0.08) {}
  FrameClock(double rate_hz, double frame_duration_s);  // throws std::invalid_argument

  double rate_hz() const { return rate_hz_; }
  double frame_duration_s() const { return frame_duration_s_; }

  bool operator==(const FrameClock&) const = default;

 private:
  double rate_hz_;
  double frame_duration_s_;
};

// Frame count from dialogue start; the timeline coordinate for all spans.
struct FrameIndex {
  std::uint64_t value = 0;

  auto operator<=>(const FrameIndex&) const = default;
};

// Nearest frame count for a duration, ties rounded away from zero.
// Negative or non-finite input is a std::domain_error.
std::uint64_t frames_from_seconds(double seconds, const FrameClock& clock = FrameClock());

// Exact conversion back: frames * frame_duration_s.
double seconds_from_frames(std::uint64_t frames, const FrameClock& clock = FrameClock());

}  // namespace duplexkit
