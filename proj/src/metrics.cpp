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

#include "duplexkit/metrics.hpp"

#include <algorithm>

namespace duplexkit {

namespace {

std::optional<std::size_t> first_event(const SimTrace& trace, SimEventKind kind) {
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].kind == kind) return i;
  }
  return std::nullopt;
}

TurnTakingResult latency_between(const SimTrace& trace, std::uint64_t user_end_frame,
                                 std::optional<std::uint64_t> start_frame) {
  TurnTakingResult result;
  if (!start_frame) return result;
  if (*start_frame < user_end_frame) {
    result.latency_s = 0.0;
    result.overlap_clamped = true;
    return result;
  }
  result.latency_s =
      seconds_from_frames(*start_frame - user_end_frame, trace.config_echo.clock);
  return result;
}

std::optional<double> sorted_mean(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

TurnTakingResult turn_taking_latency(const SimTrace& trace) {
  auto user_end = first_event(trace, SimEventKind::UserEnd);
  if (!user_end) {
    throw std::domain_error("turn_taking_latency: trace has no USER_END event");
  }
  auto start = first_event(trace, SimEventKind::AgentSpeechStart);
  return latency_between(trace, trace.events[*user_end].frame.value,
                         start ? std::optional<std::uint64_t>(trace.events[*start].frame.value)
                               : std::nullopt);
}

std::vector<TurnTakingResult> per_turn_turn_taking(const SimTrace& trace) {
  std::vector<TurnTakingResult> results;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].kind != SimEventKind::UserEnd) continue;
    std::optional<std::uint64_t> start;
    for (std::size_t j = i + 1; j < trace.events.size(); ++j) {
      if (trace.events[j].kind == SimEventKind::AgentSpeechStart) {
        start = trace.events[j].frame.value;
        break;
      }
    }
    results.push_back(latency_between(trace, trace.events[i].frame.value, start));
  }
  return results;
}

std::vector<BargeInResult> barge_in_results(const SimTrace& trace, double window_s) {
  if (!(window_s > 0.0)) {
    throw std::invalid_argument("barge_in_results: window must be positive");
  }
  std::vector<BargeInResult> results;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].kind != SimEventKind::BargeInStart) continue;
    const std::uint64_t cut_frame = trace.events[i].frame.value;
    BargeInResult result;
    for (std::size_t j = i + 1; j < trace.events.size(); ++j) {
      if (trace.events[j].kind == SimEventKind::BosEmitted) break;  // next agent turn began
      if (trace.events[j].kind == SimEventKind::AgentSpeechStop &&
          trace.events[j].frame.value >= cut_frame) {
        // Inclusive frame count: interruption frame through last speaking
        // frame. The scripted 8-frame stop delay measures exactly 0.64 s.
        result.latency_s = seconds_from_frames(trace.events[j].frame.value - cut_frame + 1,
                                               trace.config_echo.clock);
        break;
      }
    }
    result.success = result.latency_s.has_value() && *result.latency_s <= window_s;
    results.push_back(result);
  }
  return results;
}

MetricsReport aggregate(const std::vector<SimTrace>& traces,
                        const std::optional<CompletenessReport>& completeness, double window_s) {
  if (traces.empty()) {
    throw std::domain_error("aggregate: need at least one trace");
  }

  MetricsReport report;
  report.n_dialogues = traces.size();

  std::vector<double> turn_taking;
  std::vector<double> barge_latency;
  std::size_t successes = 0;
  for (const SimTrace& trace : traces) {
    report.n_turns += trace.turn_count;
    if (first_event(trace, SimEventKind::UserEnd)) {
      auto tt = turn_taking_latency(trace);
      if (tt.latency_s) turn_taking.push_back(*tt.latency_s);
    }
    for (const BargeInResult& result : barge_in_results(trace, window_s)) {
      ++report.n_barge_ins;
      if (result.latency_s) barge_latency.push_back(*result.latency_s);
      if (result.success) ++successes;
    }
  }

  report.turn_taking_latency_s = sorted_mean(turn_taking);
  report.turn_taking_latency_median_s = median(turn_taking);
  report.barge_in_latency_s = sorted_mean(barge_latency);
  report.barge_in_latency_median_s = median(barge_latency);
  if (report.n_barge_ins > 0) {
    report.barge_in_success_rate_pct =
        100.0 * static_cast<double>(successes) / static_cast<double>(report.n_barge_ins);
  }
  if (completeness) {
    report.completeness_raw_pct = completeness->raw_pct();
    report.completeness_placement_pct = completeness->placement_pct();
  }
  return report;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["turn_taking_latency_s"] = opt_json(report.turn_taking_latency_s);
  doc["turn_taking_latency_median_s"] = opt_json(report.turn_taking_latency_median_s);
  doc["barge_in_latency_s"] = opt_json(report.barge_in_latency_s);
  doc["barge_in_latency_median_s"] = opt_json(report.barge_in_latency_median_s);
  doc["barge_in_success_rate_pct"] = opt_json(report.barge_in_success_rate_pct);
  doc["n_dialogues"] = report.n_dialogues;
  doc["n_turns"] = report.n_turns;
  doc["n_barge_ins"] = report.n_barge_ins;
  doc["completeness_raw_pct"] = opt_json(report.completeness_raw_pct);
  doc["completeness_placement_pct"] = opt_json(report.completeness_placement_pct);
  return doc;
}

}  // namespace duplexkit
