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

#include "facl/corpus.hpp"

namespace facl {

// Long-tail interaction generator. Each user has a small favoured subset
// drawn uniformly from the catalog; every interaction is a favoured item
// with probability favored_prob and a Zipf draw otherwise.
struct SyntheticSpec {
  std::size_t num_users = 2000;
  std::size_t num_items = 500;
  double zipf_exponent = 1.2;
  std::size_t min_len = 8;
  std::size_t max_len = 20;
  std::size_t favored_count = 2;
  double favored_prob = 0.6;
  std::uint64_t seed = 1;

  void validate() const;
};

// Users are named u1, u2, ...; item identifiers run from 1 to num_items in
// descending Zipf popularity.
Corpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace facl
