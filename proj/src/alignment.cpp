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

#include "duplexkit/alignment.hpp"

#include <algorithm>

#include "duplexkit/corpus.hpp"

namespace duplexkit {

CapacityError::CapacityError(std::size_t response_tokens, std::size_t agent_frames,
                             std::optional<std::size_t> turn_index)
    : std::runtime_error("agent span of " + std::to_string(agent_frames) +
                         " frames cannot hold " + std::to_string(response_tokens) +
                         " response tokens plus BOS and EOS" +
                         (turn_index ? " (turn " + std::to_string(*turn_index) + ")" : "")),
      response_tokens_(response_tokens),
      agent_frames_(agent_frames),
      turn_index_(turn_index) {}

AlignedTurn layout_silence_turn(const TurnTiming& timing,
                                const std::vector<std::uint32_t>& response_tokens) {
  if (timing.user_frames < 1 || timing.agent_frames < 1) {
    throw std::invalid_argument("layout_silence_turn: user_frames and agent_frames must be >= 1");
  }
  const std::size_t s = timing.user_frames;
  const std::size_t d = timing.agent_frames;
  const std::size_t t = response_tokens.size();
  if (d < t + 2) {
    throw CapacityError(t, d);
  }

  AlignedTurn turn;
  turn.tokens.reserve(s + d);
  turn.tokens.insert(turn.tokens.end(), s, AgentTextToken::sil());
  turn.tokens.push_back(AgentTextToken::bos());
  for (std::uint32_t id : response_tokens) {
    turn.tokens.push_back(AgentTextToken::text(id));
  }
  turn.tokens.insert(turn.tokens.end(), d - t - 2, AgentTextToken::pad());
  turn.tokens.push_back(AgentTextToken::eos());

  turn.response_token_count = t;
  turn.bos_index = s;
  turn.eos_index = s + d - 1;
  return turn;
}

PlacementResult place_thinking_chain(std::uint32_t user_frames,
                                     const std::vector<std::size_t>& node_lengths,
                                     const std::vector<std::vector<std::uint32_t>>& node_tokens) {
  if (node_lengths.size() != node_tokens.size()) {
    throw std::invalid_argument("place_thinking_chain: node_lengths/node_tokens size mismatch");
  }
  for (std::size_t j = 0; j < node_lengths.size(); ++j) {
    if (node_lengths[j] == 0) {
      throw std::domain_error("place_thinking_chain: node lengths must be positive");
    }
    if (node_lengths[j] != node_tokens[j].size()) {
      throw std::invalid_argument("place_thinking_chain: node length does not match token list");
    }
  }

  PlacementResult result;
  result.silence_count = user_frames;
  if (node_lengths.empty()) {
    return result;  // nothing to place, nothing truncated
  }

  // Maximal whole-node prefix with M' <= S - 2; the full chain is the
  // degenerate case where the prefix is everything.
  const std::int64_t budget = static_cast<std::int64_t>(user_frames) - 2;
  std::size_t retained = 0;
  std::int64_t retained_sum = 0;
  while (retained < node_lengths.size() &&
         retained_sum + static_cast<std::int64_t>(node_lengths[retained]) <= budget) {
    retained_sum += static_cast<std::int64_t>(node_lengths[retained]);
    ++retained;
  }

  result.retained_nodes = retained;
  result.retained_token_sum = static_cast<std::uint64_t>(retained_sum);
  result.truncated = retained < node_lengths.size();
  if (retained == 0) {
    return result;  // no node fits; the window stays pure silence
  }

  result.silence_count = user_frames - static_cast<std::uint32_t>(retained_sum + 2);
  result.placed_tokens.reserve(static_cast<std::size_t>(retained_sum) + 2);
  result.placed_tokens.push_back(AgentTextToken::boc());
  for (std::size_t j = 0; j < retained; ++j) {
    for (std::uint32_t id : node_tokens[j]) {
      result.placed_tokens.push_back(AgentTextToken::text(id));
    }
  }
  result.placed_tokens.push_back(AgentTextToken::eoc());
  return result;
}

std::size_t effective_turn_frames(const TurnTiming& timing) {
  const std::size_t s = timing.user_frames;
  const std::size_t d = timing.agent_frames;
  if (!timing.barge_in) return s + d;
  std::size_t span = std::min<std::size_t>(
      static_cast<std::size_t>(timing.barge_in->cut_frame) + timing.barge_in->stop_delay_frames, d);
  span = std::max<std::size_t>(span, 2);  // room for BOS and EOS
  return s + span;
}

AlignedTurn align_turn(const TurnTiming& timing, const ThinkingChain& chain,
                       const std::vector<std::uint32_t>& response_tokens,
                       const Tokenizer& tokenizer) {
  AlignedTurn turn = layout_silence_turn(timing, response_tokens);

  if (!chain.empty()) {
    std::vector<std::vector<std::uint32_t>> node_tokens;
    std::vector<std::size_t> lengths;
    node_tokens.reserve(chain.size());
    lengths.reserve(chain.size());
    for (const ThinkingNode& node : chain.nodes) {
      node_tokens.push_back(tokenizer.tokenize(serialize_node(node, ChainFormat::Stream)));
      lengths.push_back(node_tokens.back().size());
    }
    PlacementResult placed = place_thinking_chain(timing.user_frames, lengths, node_tokens);
    for (std::size_t i = 0; i < placed.placed_tokens.size(); ++i) {
      turn.tokens[placed.silence_count + i] = placed.placed_tokens[i];
    }
  }

  if (timing.barge_in) {
    if (timing.barge_in->cut_frame < 1 || timing.barge_in->cut_frame >= timing.agent_frames) {
      throw std::invalid_argument("align_turn: barge-in cut_frame must lie inside the agent span");
    }
    const std::size_t eos = effective_turn_frames(timing) - 1;  // S + clamped span - 1
    turn.tokens.resize(eos + 1, AgentTextToken::pad());
    turn.tokens[eos] = AgentTextToken::eos();
    turn.eos_index = eos;
  }
  return turn;
}

std::vector<AlignedTurn> align_dialogue(const DialogueRecord& dialogue, const Tokenizer& tokenizer,
                                        bool thinking_enabled) {
  static const ThinkingChain kEmptyChain;
  std::vector<AlignedTurn> aligned;
  aligned.reserve(dialogue.turns.size());
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const Turn& turn = dialogue.turns[i];
    TurnTiming timing{turn.user_frames, turn.agent_frames, turn.barge_in};
    try {
      aligned.push_back(align_turn(timing, thinking_enabled ? turn.chain : kEmptyChain,
                                   tokenizer.tokenize(turn.agent_text), tokenizer));
    } catch (const CapacityError& err) {
      throw CapacityError(err.response_tokens(), err.agent_frames(), i);
    }
  }
  return aligned;
}

double CompletenessReport::raw_pct() const {
  return turns == 0 ? 0.0 : 100.0 * static_cast<double>(raw_fits) / static_cast<double>(turns);
}

double CompletenessReport::placement_pct() const {
  return turns == 0 ? 0.0
                    : 100.0 * static_cast<double>(placement_fits) / static_cast<double>(turns);
}

CompletenessReport completeness_stats(const std::vector<DialogueRecord>& dialogues,
                                      const Tokenizer& tokenizer) {
  CompletenessReport report;
  for (const DialogueRecord& dialogue : dialogues) {
    for (const Turn& turn : dialogue.turns) {
      std::uint64_t chain_tokens = 0;
      for (std::size_t len : node_token_lengths(turn.chain, tokenizer)) {
        chain_tokens += len;
      }
      ++report.turns;
      if (chain_tokens < turn.user_frames) ++report.raw_fits;
      if (chain_tokens == 0 || chain_tokens + 2 <= turn.user_frames) ++report.placement_fits;
    }
  }
  if (report.turns == 0) {
    throw std::domain_error("completeness_stats: corpus has no turns");
  }
  return report;
}

}  // namespace duplexkit
