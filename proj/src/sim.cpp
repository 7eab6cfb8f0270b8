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

#include "duplexkit/sim.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "duplexkit/random.hpp"

namespace duplexkit {

std::string_view to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::UserStart: return "USER_START";
    case SimEventKind::UserEnd: return "USER_END";
    case SimEventKind::AgentSpeechStart: return "AGENT_SPEECH_START";
    case SimEventKind::AgentSpeechStop: return "AGENT_SPEECH_STOP";
    case SimEventKind::BargeInStart: return "BARGE_IN_START";
    case SimEventKind::BocEmitted: return "BOC_EMITTED";
    case SimEventKind::EocEmitted: return "EOC_EMITTED";
    case SimEventKind::BosEmitted: return "BOS_EMITTED";
    case SimEventKind::EosEmitted: return "EOS_EMITTED";
  }
  return "?";
}

std::optional<SimEventKind> sim_event_kind_from_string(std::string_view text) {
  static constexpr SimEventKind kKinds[] = {
      SimEventKind::UserStart,        SimEventKind::UserEnd,    SimEventKind::AgentSpeechStart,
      SimEventKind::AgentSpeechStop,  SimEventKind::BargeInStart, SimEventKind::BocEmitted,
      SimEventKind::EocEmitted,       SimEventKind::BosEmitted, SimEventKind::EosEmitted,
  };
  for (SimEventKind kind : kKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

namespace {

class ScriptedPolicy final : public AgentPolicy {
 public:
  explicit ScriptedPolicy(std::vector<AlignedTurn> aligned) {
    for (const AlignedTurn& turn : aligned) {
      const std::size_t offset = tokens_.size();
      tokens_.insert(tokens_.end(), turn.tokens.begin(), turn.tokens.end());
      speaking_.resize(tokens_.size(), false);
      // Speaking strictly after BOS up to and including EOS.
      for (std::size_t f = offset + turn.bos_index + 1; f <= offset + turn.eos_index; ++f) {
        speaking_[f] = true;
      }
    }
  }

  PolicyDecision step(FrameIndex frame, bool /*user_active*/,
                      std::span<const AgentTextToken> /*own_history*/) override {
    if (frame.value >= tokens_.size()) return PolicyDecision{AgentTextToken::sil(), false};
    return PolicyDecision{tokens_[frame.value], speaking_[frame.value]};
  }

 private:
  std::vector<AgentTextToken> tokens_;
  std::vector<bool> speaking_;
};

}  // namespace

std::unique_ptr<AgentPolicy> make_scripted_policy(std::vector<AlignedTurn> aligned) {
  return std::make_unique<ScriptedPolicy>(std::move(aligned));
}

DialogueRecord inject_barge_ins(DialogueRecord dialogue, const SimConfig& config,
                                std::uint64_t rng_seed) {
  if (config.barge_in_probability < 0.0 || config.barge_in_probability > 1.0) {
    throw std::invalid_argument("inject_barge_ins: probability must lie in [0, 1]");
  }
  if (config.stop_delay_s < 0.0) {
    throw std::invalid_argument("inject_barge_ins: stop_delay_s must be non-negative");
  }
  const std::uint32_t delay_frames =
      static_cast<std::uint32_t>(frames_from_seconds(config.stop_delay_s, config.clock));

  PortableRng rng(rng_seed);
  for (Turn& turn : dialogue.turns) {
    turn.barge_in.reset();
    const bool marked = rng.next_unit() < config.barge_in_probability;
    if (!marked || turn.agent_frames < 2) continue;  // no valid cut point in a 1-frame span
    BargeInMark mark;
    mark.cut_frame = static_cast<std::uint32_t>(rng.next_in(1, turn.agent_frames - 1));
    mark.stop_delay_frames = delay_frames;
    turn.barge_in = mark;
  }
  return dialogue;
}

SimTrace run_dialogue(const DialogueRecord& dialogue, AgentPolicy& policy,
                      const SimConfig& config) {
  // Lay the turns out on the global frame timeline and mark user activity.
  // A barged turn's interrupting speech starts at the cut frame and stays
  // active through the agent's stop delay, merging into the next turn's
  // listening window.
  std::size_t total = 0;
  for (const Turn& turn : dialogue.turns) {
    TurnTiming timing{turn.user_frames, turn.agent_frames, turn.barge_in};
    total += effective_turn_frames(timing);
  }

  std::vector<bool> user_active(total, false);
  std::size_t offset = 0;
  for (const Turn& turn : dialogue.turns) {
    TurnTiming timing{turn.user_frames, turn.agent_frames, turn.barge_in};
    const std::size_t frames = effective_turn_frames(timing);
    for (std::size_t f = 0; f < turn.user_frames; ++f) user_active[offset + f] = true;
    if (turn.barge_in) {
      if (turn.barge_in->cut_frame >= turn.agent_frames) {
        throw std::invalid_argument("run_dialogue: barge-in cut_frame outside the agent span");
      }
      for (std::size_t f = turn.user_frames + turn.barge_in->cut_frame; f < frames; ++f) {
        user_active[offset + f] = true;
      }
    }
    offset += frames;
  }

  SimTrace trace;
  trace.dialogue_id = dialogue.id;
  trace.frame_count = total;
  trace.turn_count = dialogue.turns.size();
  trace.config_echo = config;
  trace.emitted_tokens.reserve(total);

  bool prev_user = false;
  bool prev_speaking = false;
  for (std::size_t f = 0; f < total; ++f) {
    const bool user = user_active[f];
    const PolicyDecision decision =
        policy.step(FrameIndex{f}, user, std::span<const AgentTextToken>(trace.emitted_tokens));

    // Spans that ended on the previous frame close first, then this frame's
    // onsets, then token emissions.
    if (prev_user && !user) {
      trace.events.push_back({FrameIndex{f - 1}, SimEventKind::UserEnd});
    }
    if (prev_speaking && !decision.speaking) {
      trace.events.push_back({FrameIndex{f - 1}, SimEventKind::AgentSpeechStop});
    }
    if (!prev_user && user) {
      trace.events.push_back({FrameIndex{f}, SimEventKind::UserStart});
      if (decision.speaking) {
        trace.events.push_back({FrameIndex{f}, SimEventKind::BargeInStart});
      }
    }
    if (!prev_speaking && decision.speaking) {
      trace.events.push_back({FrameIndex{f}, SimEventKind::AgentSpeechStart});
    }

    if (decision.token.is_control()) {
      switch (decision.token.control_kind()) {
        case ControlToken::Boc:
          trace.events.push_back({FrameIndex{f}, SimEventKind::BocEmitted});
          break;
        case ControlToken::Eoc:
          trace.events.push_back({FrameIndex{f}, SimEventKind::EocEmitted});
          break;
        case ControlToken::Bos:
          if (prev_speaking) {
            trace.violations.push_back({FrameIndex{f}, "BOS emitted while already speaking"});
          }
          trace.events.push_back({FrameIndex{f}, SimEventKind::BosEmitted});
          break;
        case ControlToken::Eos:
          trace.events.push_back({FrameIndex{f}, SimEventKind::EosEmitted});
          break;
        default:
          break;
      }
    }

    trace.emitted_tokens.push_back(decision.token);
    prev_user = user;
    prev_speaking = decision.speaking;
  }

  if (total > 0) {
    if (prev_user) trace.events.push_back({FrameIndex{total - 1}, SimEventKind::UserEnd});
    if (prev_speaking) {
      trace.events.push_back({FrameIndex{total - 1}, SimEventKind::AgentSpeechStop});
    }
  }
  return trace;
}

namespace {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

std::string serialize_trace(const SimTrace& trace) {
  std::ostringstream out;
  out << "trace frames=" << trace.frame_count << " turns=" << trace.turn_count
      << " seed=" << trace.config_echo.seed
      << " barge_in_probability=" << format_double(trace.config_echo.barge_in_probability)
      << " stop_delay_s=" << format_double(trace.config_echo.stop_delay_s)
      << " rate_hz=" << format_double(trace.config_echo.clock.rate_hz())
      << " frame_s=" << format_double(trace.config_echo.clock.frame_duration_s())
      << " id=" << nlohmann::json(trace.dialogue_id).dump() << '\n';
  for (const SimEvent& event : trace.events) {
    out << "e " << event.frame.value << ' ' << to_string(event.kind) << '\n';
  }
  for (const ProtocolViolation& violation : trace.violations) {
    out << "v " << violation.frame.value << ' ' << violation.description << '\n';
  }
  out << "t";
  for (const AgentTextToken& token : trace.emitted_tokens) {
    out << ' ' << to_string(token);
  }
  out << "\nend\n";
  return out.str();
}

void save_traces(const std::vector<SimTrace>& traces, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write trace file: " + path.string());
  }
  out << "#duplexkit-trace v1\n";
  for (const SimTrace& trace : traces) {
    out << serialize_trace(trace);
  }
}

namespace {

// "key=value" scanner for trace header lines.
std::string_view header_field(std::string_view line, std::string_view key) {
  const std::string want = std::string(key) + "=";
  std::size_t pos = line.find(want);
  if (pos == std::string_view::npos) {
    throw std::runtime_error("trace header missing field: " + std::string(key));
  }
  pos += want.size();
  std::size_t end = line.find(' ', pos);
  if (end == std::string_view::npos) end = line.size();
  return line.substr(pos, end - pos);
}

}  // namespace

std::vector<SimTrace> load_traces(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open trace file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "#duplexkit-trace v1") {
    throw std::runtime_error("not a duplexkit trace file: " + path.string());
  }

  std::vector<SimTrace> traces;
  SimTrace current;
  bool open = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("trace ", 0) == 0) {
      if (open) throw std::runtime_error("trace without 'end' before line " + std::to_string(line_no));
      current = SimTrace{};
      current.frame_count = std::stoull(std::string(header_field(line, "frames")));
      current.turn_count = std::stoull(std::string(header_field(line, "turns")));
      current.config_echo.seed = std::stoull(std::string(header_field(line, "seed")));
      current.config_echo.barge_in_probability =
          std::stod(std::string(header_field(line, "barge_in_probability")));
      current.config_echo.stop_delay_s = std::stod(std::string(header_field(line, "stop_delay_s")));
      const double rate = std::stod(std::string(header_field(line, "rate_hz")));
      const double frame_s = std::stod(std::string(header_field(line, "frame_s")));
      current.config_echo.clock = FrameClock(rate, frame_s);
      const std::size_t id_pos = line.find(" id=");
      if (id_pos == std::string::npos) throw std::runtime_error("trace header missing id");
      current.dialogue_id = nlohmann::json::parse(line.substr(id_pos + 4)).get<std::string>();
      open = true;
    } else if (line.rfind("e ", 0) == 0) {
      if (!open) throw std::runtime_error("event outside trace at line " + std::to_string(line_no));
      std::istringstream fields(line.substr(2));
      std::uint64_t frame = 0;
      std::string kind;
      fields >> frame >> kind;
      auto parsed = sim_event_kind_from_string(kind);
      if (!fields || !parsed) {
        throw std::runtime_error("bad event at line " + std::to_string(line_no));
      }
      current.events.push_back({FrameIndex{frame}, *parsed});
    } else if (line.rfind("v ", 0) == 0) {
      if (!open) throw std::runtime_error("violation outside trace at line " + std::to_string(line_no));
      std::size_t space = line.find(' ', 2);
      if (space == std::string::npos) {
        throw std::runtime_error("bad violation at line " + std::to_string(line_no));
      }
      current.violations.push_back(
          {FrameIndex{std::stoull(line.substr(2, space - 2))}, line.substr(space + 1)});
    } else if (line == "t" || line.rfind("t ", 0) == 0) {
      if (!open) throw std::runtime_error("tokens outside trace at line " + std::to_string(line_no));
      std::istringstream fields(line.size() > 1 ? line.substr(2) : std::string());
      std::string item;
      while (fields >> item) {
        auto token = agent_token_from_string(item);
        if (!token) throw std::runtime_error("bad token at line " + std::to_string(line_no));
        current.emitted_tokens.push_back(*token);
      }
    } else if (line == "end") {
      if (!open) throw std::runtime_error("'end' outside trace at line " + std::to_string(line_no));
      traces.push_back(std::move(current));
      open = false;
    } else {
      throw std::runtime_error("unrecognized trace line " + std::to_string(line_no));
    }
  }
  if (open) throw std::runtime_error("trace file truncated: " + path.string());
  return traces;
}

}  // namespace duplexkit
