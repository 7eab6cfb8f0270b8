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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "duplexkit/alignment.hpp"
#include "duplexkit/corpus.hpp"
#include "duplexkit/stream.hpp"

namespace duplexkit {

struct SimConfig {
  std::uint64_t seed = 0;
  double barge_in_probability = 0.5;  // per turn, in [0, 1]
  double stop_delay_s = 0.64;         // agent keeps speaking this long after a cut
  FrameClock clock;

  bool operator==(const SimConfig&) const = default;
};

enum class SimEventKind : std::uint8_t {
  UserStart,         // first frame of a user-activity span
  UserEnd,           // last frame of a user-activity span
  AgentSpeechStart,  // first frame the agent speaks
  AgentSpeechStop,   // last frame the agent speaks
  BargeInStart,      // user-activity onset while the agent is speaking
  BocEmitted,
  EocEmitted,
  BosEmitted,
  EosEmitted,
};

std::string_view to_string(SimEventKind kind);  // "USER_START", ...
std::optional<SimEventKind> sim_event_kind_from_string(std::string_view text);

struct SimEvent {
  FrameIndex frame;
  SimEventKind kind = SimEventKind::UserStart;

  bool operator==(const SimEvent&) const = default;
};

// A policy misbehaved; recorded, not fatal, so faulty policies can still be
// measured.
struct ProtocolViolation {
  FrameIndex frame;
  std::string description;

  bool operator==(const ProtocolViolation&) const = default;
};

struct SimTrace {
  std::string dialogue_id;
  std::size_t frame_count = 0;
  std::size_t turn_count = 0;
  std::vector<SimEvent> events;  // non-decreasing in frame
  std::vector<ProtocolViolation> violations;
  std::vector<AgentTextToken> emitted_tokens;  // one per frame
  SimConfig config_echo;

  bool operator==(const SimTrace&) const = default;
};

struct PolicyDecision {
  AgentTextToken token = AgentTextToken::sil();
  bool speaking = false;
};

// Queried once per frame in order. The interface is strictly causal: a
// policy sees the current frame's user-activity flag and only the tokens it
// already emitted on frames [0, frame).
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;

  virtual PolicyDecision step(FrameIndex frame, bool user_active,
                              std::span<const AgentTextToken> own_history) = 0;
};

// Replays a ground-truth alignment: emits the aligned token at each frame
// and reports speaking on frames strictly after BOS up to and including EOS
// of each turn. Frames beyond the script emit silence.
std::unique_ptr<AgentPolicy> make_scripted_policy(std::vector<AlignedTurn> aligned);

// Marks each turn with a barge-in with probability
// config.barge_in_probability (cut frame uniform in [1, D-1], stop delay
// frames_from_seconds(config.stop_delay_s)). Single-frame agent spans are
// never marked. Deterministic in rng_seed; one Bernoulli draw is consumed
// per turn regardless of the outcome.
DialogueRecord inject_barge_ins(DialogueRecord dialogue, const SimConfig& config,
                                std::uint64_t rng_seed);

// Frame-synchronous replay of one dialogue: user activity comes from the
// record (a barged turn's interrupting speech starts at the cut frame and
// runs into the next turn's listening window), the policy is queried once
// per frame, events are derived from activity transitions and control-token
// emissions. Identical inputs produce identical traces.
SimTrace run_dialogue(const DialogueRecord& dialogue, AgentPolicy& policy,
                      const SimConfig& config);

// Trace files: "#duplexkit-trace v1" header, then per trace a "trace" line
// (id, frames, turns, config echo), "e <frame> <KIND>" per event,
// "v <frame> <description>" per violation, "t <tok> ..." for the emitted
// tokens, and "end". Within one frame, span closures precede onsets and
// token emissions; closures still open at the end of the trace are flushed
// at the final frame, after that frame's other events.
std::string serialize_trace(const SimTrace& trace);
void save_traces(const std::vector<SimTrace>& traces, const std::filesystem::path& path);
std::vector<SimTrace> load_traces(const std::filesystem::path& path);

}  // namespace duplexkit
