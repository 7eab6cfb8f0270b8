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

#include <doctest.h>

#include <limits>
#include <random>

#include "duplexkit/stream.hpp"

using namespace duplexkit;

TEST_CASE("frame clock construction") {
  FrameClock clock;
  CHECK(clock.rate_hz() == 12.5);
  CHECK(clock.frame_duration_s() == 0.08);
  CHECK(clock.rate_hz() * clock.frame_duration_s() == 1.0);

  CHECK_THROWS_AS(FrameClock(12.5, 0.07), std::invalid_argument);
  CHECK_THROWS_AS(FrameClock(0.0, 0.08), std::invalid_argument);
  CHECK_THROWS_AS(FrameClock(-12.5, -0.08), std::invalid_argument);
}

TEST_CASE("frames_from_seconds") {
  CHECK(frames_from_seconds(0.64) == 8);
  CHECK(frames_from_seconds(0.0) == 0);
  // 1.0 s is 12.5 frames; ties round away from zero.
  CHECK(frames_from_seconds(1.0) == 13);
  // 0.04 s is exactly half a frame.
  CHECK(frames_from_seconds(0.04) == 1);
  CHECK(frames_from_seconds(2.0) == 25);

  CHECK_THROWS_AS(frames_from_seconds(-0.1), std::domain_error);
  CHECK_THROWS_AS(frames_from_seconds(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
}

TEST_CASE("seconds_from_frames") {
  CHECK(seconds_from_frames(8) == 0.64);
  CHECK(seconds_from_frames(0) == 0.0);
  CHECK(seconds_from_frames(25) == 2.0);
}

TEST_CASE("frame/second round-trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t frames = rng() % 1000000000ull;
    CHECK(frames_from_seconds(seconds_from_frames(frames)) == frames);
  }
}

TEST_CASE("control token strings") {
  const ControlToken kinds[] = {ControlToken::Sil, ControlToken::Bos, ControlToken::Eos,
                                ControlToken::Pad, ControlToken::Boc, ControlToken::Eoc};
  for (ControlToken kind : kinds) {
    auto parsed = control_token_from_string(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK(to_string(ControlToken::Sil) == "<SIL>");
  CHECK(to_string(ControlToken::Boc) == "<BOC>");
  CHECK(!control_token_from_string("<NOPE>").has_value());
}

TEST_CASE("agent text tokens") {
  const AgentTextToken sil = AgentTextToken::sil();
  const AgentTextToken word = AgentTextToken::text(42);
  CHECK(sil.is_control());
  CHECK(sil.is_control(ControlToken::Sil));
  CHECK(!sil.is_control(ControlToken::Bos));
  CHECK(word.is_text());
  CHECK(word.text_id() == 42);
  CHECK(sil != word);
  CHECK(AgentTextToken::text(42) == word);
  // A control token is distinct from every text id.
  for (std::uint32_t id : {0u, 1u, 5u}) {
    CHECK(AgentTextToken::text(id) != sil);
  }

  CHECK(to_string(word) == "42");
  CHECK(to_string(sil) == "<SIL>");
  CHECK(agent_token_from_string("<EOC>") == AgentTextToken::eoc());
  CHECK(agent_token_from_string("17") == AgentTextToken::text(17));
  CHECK(!agent_token_from_string("x17").has_value());
  CHECK(!agent_token_from_string("").has_value());
}
