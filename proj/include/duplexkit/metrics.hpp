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

#include <optional>
#include <vector>

#include <json.hpp>

#include "duplexkit/alignment.hpp"
#include "duplexkit/sim.hpp"

namespace duplexkit {

// Delay between the user finishing their first utterance and the agent's
// speech onset. Absent when the agent never starts speaking. When the agent
// started before the user finished, the latency clamps to 0 and
// overlap_clamped is set.
struct TurnTakingResult {
  std::optional<double> latency_s;
  bool overlap_clamped = false;
};

// One user interruption. latency_s counts frames from the interruption
// through the agent's last speaking frame, inclusive; absent when the agent
// never stops within the same agent turn. success iff present and within
// the window.
struct BargeInResult {
  std::optional<double> latency_s;
  bool success = false;
};

// First-turn latency: first AGENT_SPEECH_START frame minus first USER_END
// frame, in seconds. Throws std::domain_error when the trace has no
// USER_END.
TurnTakingResult turn_taking_latency(const SimTrace& trace);

// Non-paper per-turn variant: one result per USER_END, measured to the next
// AGENT_SPEECH_START. The headline metric is first-turn only.
std::vector<TurnTakingResult> per_turn_turn_taking(const SimTrace& trace);

// One result per BARGE_IN_START; the stop must occur before the next agent
// turn begins.
std::vector<BargeInResult> barge_in_results(const SimTrace& trace, double window_s = 1.5);

struct MetricsReport {
  std::optional<double> turn_taking_latency_s;         // mean over present values
  std::optional<double> turn_taking_latency_median_s;
  std::optional<double> barge_in_latency_s;            // mean over present values
  std::optional<double> barge_in_latency_median_s;
  std::optional<double> barge_in_success_rate_pct;     // absent = no barge-ins observed
  std::size_t n_dialogues = 0;
  std::size_t n_turns = 0;
  std::size_t n_barge_ins = 0;
  std::optional<double> completeness_raw_pct;          // pass-through from alignment
  std::optional<double> completeness_placement_pct;
};

// Corpus-level aggregation. Means are sum-then-divide over ascending-sorted
// values, so the result is independent of trace order. Throws
// std::domain_error on an empty trace list.
MetricsReport aggregate(const std::vector<SimTrace>& traces,
                        const std::optional<CompletenessReport>& completeness = std::nullopt,
                        double window_s = 1.5);

// Fixed field names; absent values serialize as null.
nlohmann::ordered_json report_to_json(const MetricsReport& report);

}  // namespace duplexkit
