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

#include "facl/synth.hpp"

#include <algorithm>
#include <cmath>

#include "facl/rng.hpp"

namespace facl {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, "synthetic: " + m); };
  if (num_users < 1) fail("num_users must be positive");
  if (num_items < 1) fail("num_items must be positive");
  if (!(zipf_exponent > 0.0)) fail("zipf_exponent must be > 0");
  if (min_len < 1 || min_len > max_len) fail("need 1 <= min_len <= max_len");
  if (favored_count > num_items) fail("favored_count exceeds num_items");
  if (!(favored_prob >= 0.0 && favored_prob <= 1.0)) fail("favored_prob must lie in [0, 1]");
  if (favored_count == 0 && favored_prob > 0.0) fail("favored_prob > 0 needs favored items");
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<double> cdf(spec.num_items);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.num_items; ++i) {
    acc += std::pow(static_cast<double>(i + 1), -spec.zipf_exponent);
    cdf[i] = acc;
  }
  for (double& c : cdf) c /= acc;
  cdf.back() = 1.0;

  Corpus corpus;
  corpus.item_ids.resize(spec.num_items);
  for (std::size_t i = 0; i < spec.num_items; ++i)
    corpus.item_ids[i] = static_cast<std::int64_t>(i + 1);

  std::vector<ItemIndex> pool(spec.num_items);
  for (std::size_t u = 0; u < spec.num_users; ++u) {
    RngStream rng(spec.seed, u, 0, StreamTag::kSynthetic);
    for (std::size_t i = 0; i < spec.num_items; ++i) pool[i] = static_cast<ItemIndex>(i);
    // Partial Fisher-Yates: the first favored_count slots become the subset.
    for (std::size_t i = 0; i < spec.favored_count; ++i)
      std::swap(pool[i], pool[i + rng.uniform_index(spec.num_items - i)]);

    const std::size_t len = spec.min_len + rng.uniform_index(spec.max_len - spec.min_len + 1);
    InteractionSequence seq{"u" + std::to_string(u + 1), {}};
    seq.items.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
      if (rng.uniform() <= spec.favored_prob) {
        seq.items.push_back(pool[rng.uniform_index(spec.favored_count)]);
      } else {
        const double z = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), z);
        seq.items.push_back(static_cast<ItemIndex>(it - cdf.begin()));
      }
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return compact(corpus);
}

}  // namespace facl
