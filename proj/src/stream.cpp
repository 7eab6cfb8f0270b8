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

#include "duplexkit/stream.hpp"

#include <cmath>
#include <stdexcept>

namespace duplexkit {

std::string_view to_string(ControlToken token) {
  switch (token) {
    case ControlToken::Sil: return "<SIL>";
    case ControlToken::Bos: return "<BOS>";
    case ControlToken::Eos: return "<EOS>";
    case ControlToken::Pad: return "<PAD>";
    case ControlToken::Boc: return "<BOC>";
    case ControlToken::Eoc: return "<EOC>";
  }
  return "<?>";
}

std::optional<ControlToken> control_token_from_string(std::string_view text) {
  if (text == "<SIL>") return ControlToken::Sil;
  if (text == "<BOS>") return ControlToken::Bos;
  if (text == "<EOS>") return ControlToken::Eos;
  if (text == "<PAD>") return ControlToken::Pad;
  if (text == "<BOC>") return ControlToken::Boc;
  if (text == "<EOC>") return ControlToken::Eoc;
  return std::nullopt;
}

std::string to_string(const AgentTextToken& token) {
  if (token.is_control()) return std::string(to_string(token.control_kind()));
  return std::to_string(token.text_id());
}

std::optional<AgentTextToken> agent_token_from_string(std::string_view text) {
  if (auto kind = control_token_from_string(text)) return AgentTextToken::control(*kind);
  if (text.empty()) return std::nullopt;
  std::uint64_t id = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    id = id * 10 + static_cast<std::uint64_t>(c - '0');
    if (id > 0xFFFFFFFFull) return std::nullopt;
  }
  return AgentTextToken::text(static_cast<std::uint32_t>(id));
}

FrameClock::FrameClock(double rate_hz, double frame_duration_s)
    : rate_hz_(rate_hz), frame_duration_s_(frame_duration_s) {
  if (!(rate_hz > 0.0)) {
    throw std::invalid_argument("FrameClock: rate_hz must be positive");
  }
  if (rate_hz * frame_duration_s != 1.0) {
    throw std::invalid_argument("FrameClock: rate_hz * frame_duration_s must equal 1.0");
  }
}

std::uint64_t frames_from_seconds(double seconds, const FrameClock& clock) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw std::domain_error("frames_from_seconds: seconds must be finite and non-negative");
  }
  return static_cast<std::uint64_t>(std::llround(seconds * clock.rate_hz()));
}

double seconds_from_frames(std::uint64_t frames, const FrameClock& clock) {
  return static_cast<double>(frames) * clock.frame_duration_s();
}

}  // namespace duplexkit
