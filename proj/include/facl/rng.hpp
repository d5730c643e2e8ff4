// Copyright 2026 The FACL Authors. All Rights Reserved.
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

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <random>
#include <utility>

namespace facl {

// Sub-stream tags mixed into the key so that every consumer of randomness
// in a run draws from its own stream.
enum class StreamTag : std::uint64_t {
  kView0 = 0,
  kView1 = 1,
  kDropoutOriginal = 2,
  kDropoutView0 = 3,
  kDropoutView1 = 4,
  kShuffle = 5,
  kInit = 6,
  kAudit = 7,
  kSynthetic = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

// Keyed random stream. The same (seed, user, epoch, tag) always yields the
// same draw sequence; distributions are implemented here rather than taken
// from <random> so draws are identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  RngStream(std::uint64_t seed, std::uint64_t user, std::uint64_t epoch,
            std::uint64_t view);
  RngStream(std::uint64_t seed, std::uint64_t user, std::uint64_t epoch,
            StreamTag tag)
      : RngStream(seed, user, epoch, static_cast<std::uint64_t>(tag)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on (0, 1]: z <= p is certain at p = 1 and impossible at p = 0.
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, n), unbiased. n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller.
  double normal();

  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::size_t>(std::distance(first, last));
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = uniform_index(i);
      using std::swap;
      swap(first[static_cast<std::ptrdiff_t>(i - 1)],
           first[static_cast<std::ptrdiff_t>(j)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace facl
