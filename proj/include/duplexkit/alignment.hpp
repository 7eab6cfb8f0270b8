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
#include <vector>

#include "duplexkit/chain.hpp"
#include "duplexkit/stream.hpp"
#include "duplexkit/tokenizer.hpp"

namespace duplexkit {

struct DialogueRecord;  // corpus.hpp

// A user interruption within an agent speech span. The agent keeps speaking
// for stop_delay_frames after the cut (8 frames = 0.64 s at 12.5 Hz).
struct BargeInMark {
  std::uint32_t cut_frame = 1;          // offset within the agent span, >= 1
  std::uint32_t stop_delay_frames = 8;

  bool operator==(const BargeInMark&) const = default;
};

// Frame budget of one turn: S frames of listening window (the silence-slot
// count absent thinking) followed by D frames of agent speech span.
struct TurnTiming {
  std::uint32_t user_frames = 1;   // S, >= 1
  std::uint32_t agent_frames = 1;  // D, >= 1
  std::optional<BargeInMark> barge_in;

  bool operator==(const TurnTiming&) const = default;
};

// The agent span cannot hold BOS + T response tokens + EOS.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::size_t response_tokens, std::size_t agent_frames,
                std::optional<std::size_t> turn_index = std::nullopt);

  std::size_t response_tokens() const { return response_tokens_; }
  std::size_t agent_frames() const { return agent_frames_; }
  std::optional<std::size_t> turn_index() const { return turn_index_; }

 private:
  std::size_t response_tokens_;
  std::size_t agent_frames_;
  std::optional<std::size_t> turn_index_;
};

// Outcome of fitting a chain into an S-frame listening window. placed_tokens
// is either empty or BOC + retained chain tokens + EOC, and
// silence_count + placed_tokens.size() == S always holds.
struct PlacementResult {
  std::uint32_t silence_count = 0;
  std::vector<AgentTextToken> placed_tokens;
  std::size_t retained_nodes = 0;
  bool truncated = false;                 // true iff retained_nodes < node count
  std::uint64_t retained_token_sum = 0;   // M' = sum of retained node lengths

  bool operator==(const PlacementResult&) const = default;
};

// One turn of the agent text channel: the S-frame listening window (silence,
// optionally ending in the chain block), then BOS, T response tokens, PAD
// fill, EOS.
struct AlignedTurn {
  std::vector<AgentTextToken> tokens;
  std::size_t response_token_count = 0;  // T
  std::size_t bos_index = 0;             // always == S
  std::size_t eos_index = 0;             // S + D - 1, or earlier after a barge-in

  bool operator==(const AlignedTurn&) const = default;
};

// The plain layout: SIL*S, BOS, response, PAD*(D-T-2), EOS. Requires
// D >= T + 2; otherwise throws CapacityError. Ignores any barge-in mark.
AlignedTurn layout_silence_turn(const TurnTiming& timing,
                                const std::vector<std::uint32_t>& response_tokens);

// Fits a chain of N nodes with token lists node_tokens (lengths
// node_lengths) into a window of S silence slots. Full fit when
// sum(M_j) <= S - 2; otherwise the maximal whole-node prefix that fits is
// retained, and when no node fits the window stays pure silence.
// Every node length must be positive and match its token list.
PlacementResult place_thinking_chain(std::uint32_t user_frames,
                                     const std::vector<std::size_t>& node_lengths,
                                     const std::vector<std::vector<std::uint32_t>>& node_tokens);

// layout_silence_turn with the trailing silence slots replaced by the placed
// chain block. A barge-in moves EOS to S + cut_frame + stop_delay_frames - 1
// (clamped into [S+1, S+D-1]) and drops everything at or after that index.
AlignedTurn align_turn(const TurnTiming& timing, const ThinkingChain& chain,
                       const std::vector<std::uint32_t>& response_tokens,
                       const Tokenizer& tokenizer);

// Frames the turn occupies on the agent channel: S + D, shortened by a
// barge-in to S + min(cut_frame + stop_delay_frames, D) (never below S + 2).
std::size_t effective_turn_frames(const TurnTiming& timing);

// Per-turn align_turn over a dialogue; the chain is used iff
// thinking_enabled. The first CapacityError aborts and carries the turn
// index.
std::vector<AlignedTurn> align_dialogue(const DialogueRecord& dialogue,
                                        const Tokenizer& tokenizer, bool thinking_enabled);

// Chain-completeness tallies over a corpus. raw counts turns with M < S;
// placement counts turns whose whole chain is placed without truncation
// (M == 0, or M + 2 <= S).
struct CompletenessReport {
  std::size_t turns = 0;
  std::size_t raw_fits = 0;
  std::size_t placement_fits = 0;

  double raw_pct() const;
  double placement_pct() const;

  bool operator==(const CompletenessReport&) const = default;
};

// Throws std::domain_error on an empty corpus.
CompletenessReport completeness_stats(const std::vector<DialogueRecord>& dialogues,
                                      const Tokenizer& tokenizer);

}  // namespace duplexkit
