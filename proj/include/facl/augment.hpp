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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facl/corpus.hpp"
#include "facl/rng.hpp"
#include "facl/types.hpp"

namespace facl {

// kAdaptive scales perturbation by item frequency; kUniform perturbs every
// item with probability gamma and accepts every sampled span.
enum class AugmentPolicy { kAdaptive, kUniform };

std::string_view to_string(AugmentPolicy policy);
AugmentPolicy parse_augment_policy(std::string_view text);

struct AugmentationConfig {
  double gamma = 0.3;           // target augmentation ratio
  double eta = 0.3;             // subsequence length ratio
  double cap_multiplier = 2.0;  // rho is capped at cap_multiplier * gamma
  int max_resamples = 20;
  int correlation_top_k = 20;
  int correlation_window = 5;
  std::size_t max_len = 50;  // insert output is suffix-truncated to this
  AugmentPolicy policy = AugmentPolicy::kAdaptive;
  bool length_aware = false;  // ablation: scale rho and alpha by |S|/l

  void validate() const;
};

// --- per-item probabilities ------------------------------------------------

// min(gamma * f / f_seq, cap * gamma), clamped to [0, 1].
double item_perturb_prob(double item_freq, double seq_avg_freq,
                         const AugmentationConfig& cfg);
double item_perturb_prob(ItemIndex item, const FrequencyTable& freq,
                         double seq_avg_freq, const AugmentationConfig& cfg);

// Capped rho scaled by seq_len / global_avg_length, then clamped to [0, 1].
double len_aware_item_perturb_prob(ItemIndex item, const FrequencyTable& freq,
                                   double seq_avg_freq, std::size_t seq_len,
                                   const CorpusStats& stats,
                                   const AugmentationConfig& cfg);

// Per-position probabilities for `seq` under cfg.policy and
// cfg.length_aware, with the sequence average taken over `seq` itself.
std::vector<double> perturb_probs(std::span<const ItemIndex> seq,
                                  const FrequencyTable& freq,
                                  const CorpusStats& stats,
                                  const AugmentationConfig& cfg);

// --- correlation index -----------------------------------------------------

struct Neighbor {
  ItemIndex item;
  double score;
};

// Top-k co-occurrence neighbours per item. Scores are windowed
// co-occurrence counts normalised by sqrt(f(a) f(b)).
class CorrelationIndex {
 public:
  CorrelationIndex() = default;
  CorrelationIndex(std::vector<std::vector<Neighbor>> neighbors,
                   int window, int top_k);

  std::span<const Neighbor> neighbors(ItemIndex item) const {
    const auto i = static_cast<std::size_t>(item);
    if (i >= neighbors_.size()) return {};
    return neighbors_[i];
  }
  std::size_t catalog_size() const { return neighbors_.size(); }
  int window() const { return window_; }
  int top_k() const { return top_k_; }

  // Text sidecar, first line "facl-correlation-index 1".
  void save(std::ostream& out) const;
  static CorrelationIndex load(std::istream& in);

  friend bool operator==(const CorrelationIndex& a, const CorrelationIndex& b);

 private:
  std::vector<std::vector<Neighbor>> neighbors_;
  int window_ = 0;
  int top_k_ = 0;
};

bool operator==(const Neighbor& a, const Neighbor& b);

// Two positions co-occur when their distance is below `window`. Ties in
// score are broken by ascending item index.
CorrelationIndex build_correlation_index(const Corpus& train,
                                         const FrequencyTable& freq,
                                         int window, int top_k);
CorrelationIndex build_correlation_index(const Corpus& train,
                                         const AugmentationConfig& cfg);

// --- item-oriented operators -----------------------------------------------
// `perturbed`, when given, receives the input positions that were touched.

// Item i survives iff z_i > rho_i. If nothing survives, the last item is kept.
Sequence op_drop(std::span<const ItemIndex> seq, std::span<const double> probs,
                 RngStream& rng, std::vector<std::size_t>* perturbed = nullptr);

// Item i is replaced by a uniformly chosen top-k neighbour iff z_i <= rho_i.
// Items without neighbours are never replaced.
Sequence op_substitute(std::span<const ItemIndex> seq,
                       std::span<const double> probs,
                       const CorrelationIndex& corr, RngStream& rng,
                       std::vector<std::size_t>* perturbed = nullptr);

// A neighbour is placed right after item i iff z_i <= rho_i. The result keeps
// its most recent max_len items.
Sequence op_insert(std::span<const ItemIndex> seq, std::span<const double> probs,
                   const CorrelationIndex& corr, RngStream& rng,
                   std::size_t max_len,
                   std::vector<std::size_t>* perturbed = nullptr);

// --- subsequence-oriented operators ----------------------------------------

struct Span {
  std::size_t start = 0;  // 0-based
  std::size_t length = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

// ceil(eta * n), clamped to [1, n].
std::size_t subsequence_length(std::size_t n, double eta);

// Uniform start over the n - c + 1 admissible positions.
Span sample_subsequence(std::size_t n, double eta, RngStream& rng);

// min(f_min(span) / global_avg_frequency, 1).
double subsequence_accept_prob(std::span<const ItemIndex> span,
                               const FrequencyTable& freq,
                               const CorpusStats& stats);
double len_aware_accept_prob(std::span<const ItemIndex> span,
                             const FrequencyTable& freq,
                             const CorpusStats& stats, std::size_t seq_len);

// Acceptance probability of a span of `seq` under cfg.policy/length_aware.
double span_accept_prob(std::span<const ItemIndex> seq, Span span,
                        const FrequencyTable& freq, const CorpusStats& stats,
                        const AugmentationConfig& cfg);

// Rejection sampling: draws spans until z <= alpha, at most max_resamples
// times; falls back to the highest-alpha span seen (earliest on ties).
Span accepted_subsequence(std::span<const ItemIndex> seq,
                          const AugmentationConfig& cfg,
                          const FrequencyTable& freq, const CorpusStats& stats,
                          RngStream& rng);

Sequence op_crop(std::span<const ItemIndex> seq, Span span);
Sequence op_reorder(std::span<const ItemIndex> seq, Span span, RngStream& rng);

// --- view generation -------------------------------------------------------

enum class SubsequenceOp { kCrop, kReorder };
enum class ItemOp { kDrop, kSubstitute, kInsert };

std::string_view to_string(SubsequenceOp op);
std::string_view to_string(ItemOp op);

struct ViewProvenance {
  SubsequenceOp subsequence_op = SubsequenceOp::kCrop;
  Span span;
  ItemOp item_op = ItemOp::kDrop;
  // Positions in the intermediate (post-subsequence-op) sequence.
  std::vector<std::size_t> positions;
};

struct AugmentedView {
  Sequence items;
  ViewProvenance provenance;
};

struct AugmentedViewPair {
  AugmentedView first;
  AugmentedView second;
};

// Shared read-only state for view generation.
class Augmenter {
 public:
  Augmenter(const FrequencyTable& freq, const CorpusStats& stats,
            const CorrelationIndex& corr, AugmentationConfig cfg);

  // One subsequence-oriented operator (crop or reorder) followed by one
  // item-oriented operator (drop, substitute or insert), each chosen
  // uniformly; rho is recomputed on the intermediate sequence.
  AugmentedView view(std::span<const ItemIndex> seq, RngStream& rng) const;
  AugmentedViewPair views(std::span<const ItemIndex> seq, RngStream& first,
                          RngStream& second) const;

  const AugmentationConfig& config() const { return cfg_; }

 private:
  const FrequencyTable& freq_;
  const CorpusStats& stats_;
  const CorrelationIndex& corr_;
  AugmentationConfig cfg_;
};

}  // namespace facl
