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
#include <span>
#include <vector>

#include "facl/corpus.hpp"

namespace facl {

struct ReweightConfig {
  double beta = 0.1;
  bool enabled = true;  // false: every weight is exactly 1, nothing computed
  bool clip = true;
  double min_weight = 0.1;
  double max_weight = 10.0;
  bool normalize = false;  // divide batch weights by their mean

  void validate() const;
};

// Mean training frequency over the positions of `seq`.
double sequence_avg_frequency(std::span<const ItemIndex> seq,
                              const FrequencyTable& freq);

// (f / f(S) * l / |S|)^beta, optionally clipped to [min_weight, max_weight].
double sequence_weight(std::span<const ItemIndex> seq,
                       const FrequencyTable& freq, const CorpusStats& stats,
                       const ReweightConfig& cfg);

// Weights for a batch, applying cfg.normalize when set.
std::vector<double> batch_weights(std::span<const Sequence> seqs,
                                  const FrequencyTable& freq,
                                  const CorpusStats& stats,
                                  const ReweightConfig& cfg);

struct HistogramBucket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

// Equal-width histogram over [min, max] of `weights`.
std::vector<HistogramBucket> weight_histogram(std::span<const double> weights,
                                              std::size_t num_buckets = 20);

}  // namespace facl
