// Copyright 2026 The kpinsker Authors
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

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is
// addressed by (seed, stream id); each replication owns its own stream so
// results do not depend on how replications are spread over threads.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace kpinsker {

class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // One raw block: ten rounds of the Philox bijection.
  static Counter block(Counter counter, Key key);

 private:
  Key key_{};
  Counter counter_{};
  Counter buffer_{};
  unsigned used_ = 4;
};

// Stream id for replication `rep` of experiment slot `slot`.
constexpr std::uint64_t stream_id(std::uint32_t slot, std::uint32_t rep) {
  return (static_cast<std::uint64_t>(slot) << 32) | rep;
}

}  // namespace kpinsker
