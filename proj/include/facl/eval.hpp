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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facl/augment.hpp"
#include "facl/corpus.hpp"
#include "facl/model.hpp"

namespace facl {

// 1 + number of items scoring strictly higher than the target, plus the
// number of lower-indexed items scoring exactly the same.
template <typename Scalar>
std::size_t rank_target(const RowVectorX<Scalar>& scores, ItemIndex target);

double hr_at_k(std::span<const std::size_t> ranks, std::size_t k);
double ndcg_at_k(std::span<const std::size_t> ranks, std::size_t k);

// Ranks each example's target over the full catalog in eval mode.
template <typename Scalar>
std::vector<std::size_t> rank_examples(std::span<const LabeledExample> examples,
                                       const ModelParams<Scalar>& params,
                                       const ModelConfig& cfg,
                                       std::size_t batch_size = 256);

struct MetricAtK {
  std::size_t k = 0;
  double hr = 0.0;
  double ndcg = 0.0;
};

struct BinMetrics {
  std::string kind;  // "item" or "user"
  std::string label;
  std::size_t count = 0;
  std::optional<double> hr10;  // absent for an empty bin
  std::optional<double> ndcg10;
};

struct EvalReport {
  std::size_t num_examples = 0;
  std::vector<MetricAtK> overall;
  std::vector<BinMetrics> bins;

  // Overall metric at k; throws if k was not evaluated.
  const MetricAtK& at(std::size_t k) const;
  const BinMetrics& bin(const std::string& kind, const std::string& label) const;
};

// Item bins are looked up by the target's training count, user bins by the
// user's training-sequence length.
EvalReport binned_metrics(std::span<const std::size_t> ranks,
                          std::span<const LabeledExample> examples,
                          const Corpus& train, const FrequencyBins& item_bins,
                          const FrequencyBins& user_bins,
                          std::span<const std::size_t> ks = {});

// Tercile bins over the training split's item counts and user lengths.
FrequencyBins default_item_bins(const FrequencyTable& freq);
FrequencyBins default_user_bins(const Corpus& train);

struct AuditRow {
  std::string bin_label;
  std::string op;  // drop, substitute or insert
  double expected_rate = 0.0;
  double observed_rate = 0.0;
  std::size_t trials = 0;  // item occurrences inspected in this bin
};

// Monte Carlo estimate of how often an occurrence of an item in each bin is
// perturbed by each item-oriented operator. Each of `trials` draws picks a
// training sequence uniformly and applies the operator once, with
// probabilities from cfg.policy. The expected rate is the mean rho over the
// same occurrences; an item without neighbours contributes 0 for substitute
// and insert.
std::vector<AuditRow> perturb_audit(const Corpus& train,
                                    const FrequencyTable& freq,
                                    const CorpusStats& stats,
                                    const CorrelationIndex& corr,
                                    const FrequencyBins& bins,
                                    const AugmentationConfig& cfg,
                                    std::size_t trials, std::uint64_t seed);

// The drop rows of perturb_audit.
std::vector<AuditRow> drop_audit(const Corpus& train, const FrequencyTable& freq,
                                 const CorpusStats& stats,
                                 const FrequencyBins& bins,
                                 const AugmentationConfig& cfg,
                                 std::size_t trials, std::uint64_t seed);

}  // namespace facl
