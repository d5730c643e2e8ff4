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

#include "facl/reweight.hpp"

#include <algorithm>
#include <cmath>

namespace facl {

void ReweightConfig::validate() const {
  if (!(beta >= 0.0)) throw Error(ErrorCode::kConfig, "reweight: beta must be >= 0");
  if (clip && !(min_weight > 0.0 && min_weight <= max_weight))
    throw Error(ErrorCode::kConfig,
                "reweight: need 0 < min_weight <= max_weight");
}

double sequence_avg_frequency(std::span<const ItemIndex> seq,
                              const FrequencyTable& freq) {
  double sum = 0.0;
  for (ItemIndex v : seq) sum += static_cast<double>(freq.count(v));
  return sum / static_cast<double>(seq.size());
}

double sequence_weight(std::span<const ItemIndex> seq,
                       const FrequencyTable& freq, const CorpusStats& stats,
                       const ReweightConfig& cfg) {
  if (!cfg.enabled) return 1.0;
  const double seq_freq = sequence_avg_frequency(seq, freq);
  const double base = (stats.global_avg_frequency / seq_freq) *
                      (stats.global_avg_length / static_cast<double>(seq.size()));
  double w = std::pow(base, cfg.beta);
  if (cfg.clip) w = std::clamp(w, cfg.min_weight, cfg.max_weight);
  return w;
}

std::vector<double> batch_weights(std::span<const Sequence> seqs,
                                  const FrequencyTable& freq,
                                  const CorpusStats& stats,
                                  const ReweightConfig& cfg) {
  std::vector<double> w;
  w.reserve(seqs.size());
  for (const auto& s : seqs) w.push_back(sequence_weight(s, freq, stats, cfg));
  if (cfg.enabled && cfg.normalize && !w.empty()) {
    double mean = 0.0;
    for (double x : w) mean += x;
    mean /= static_cast<double>(w.size());
    for (double& x : w) x /= mean;
  }
  return w;
}

std::vector<HistogramBucket> weight_histogram(std::span<const double> weights,
                                              std::size_t num_buckets) {
  if (weights.empty() || num_buckets == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(weights.begin(), weights.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return {{lo, hi, weights.size()}};
  const double width = (hi - lo) / static_cast<double>(num_buckets);
  std::vector<HistogramBucket> buckets(num_buckets);
  for (std::size_t b = 0; b < num_buckets; ++b) {
    buckets[b].lower = lo + width * static_cast<double>(b);
    buckets[b].upper = b + 1 == num_buckets ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double x : weights) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    ++buckets[std::min(b, num_buckets - 1)].count;
  }
  return buckets;
}

}  // namespace facl
