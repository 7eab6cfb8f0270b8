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
#include <random>

namespace duplexkit {

// All randomness in the toolkit goes through std::mt19937_64, whose output
// sequence is fixed by the standard, with the hand-rolled reductions below.
// Standard-library distributions are deliberately avoided: their outputs
// differ across implementations, and traces must reproduce everywhere.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-stream seed for item `stream` of a corpus-level operation. Keeping
// streams independent of each other makes per-dialogue work order- and
// thread-count-invariant.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return splitmix64(base_seed ^ splitmix64(stream + 1));
}

class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Modulo reduction: the bias is negligible for the
  // small ranges used here and the result is identical on every platform.
  std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

  // Uniform integer in [lo, hi], inclusive.
  std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
    return lo + (lo == hi ? 0 : next_below(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace duplexkit
