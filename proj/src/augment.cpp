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

#include "facl/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace facl {

std::string_view to_string(AugmentPolicy policy) {
  return policy == AugmentPolicy::kAdaptive ? "adaptive" : "uniform";
}

AugmentPolicy parse_augment_policy(std::string_view text) {
  if (text == "adaptive") return AugmentPolicy::kAdaptive;
  if (text == "uniform") return AugmentPolicy::kUniform;
  throw Error(ErrorCode::kConfig,
              "unknown augmentation policy '" + std::string(text) + "'");
}

std::string_view to_string(SubsequenceOp op) {
  return op == SubsequenceOp::kCrop ? "crop" : "reorder";
}

std::string_view to_string(ItemOp op) {
  switch (op) {
    case ItemOp::kDrop: return "drop";
    case ItemOp::kSubstitute: return "substitute";
    case ItemOp::kInsert: return "insert";
  }
  return "?";
}

void AugmentationConfig::validate() const {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::kConfig, "augmentation: " + m);
  };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) fail("eta must lie in (0, 1]");
  if (!(cap_multiplier >= 1.0)) fail("cap_multiplier must be >= 1");
  if (max_resamples < 1) fail("max_resamples must be >= 1");
  if (correlation_top_k < 1) fail("correlation_top_k must be >= 1");
  if (correlation_window < 2) fail("correlation_window must be >= 2");
  if (max_len < 2) fail("max_len must be >= 2");
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double seq_avg_frequency(std::span<const ItemIndex> seq,
                         const FrequencyTable& freq) {
  double sum = 0.0;
  for (ItemIndex v : seq) sum += static_cast<double>(freq.count(v));
  return sum / static_cast<double>(seq.size());
}

}  // namespace

double item_perturb_prob(double item_freq, double seq_avg_freq,
                         const AugmentationConfig& cfg) {
  const double rho = cfg.gamma * item_freq / seq_avg_freq;
  return clamp01(std::min(rho, cfg.cap_multiplier * cfg.gamma));
}

double item_perturb_prob(ItemIndex item, const FrequencyTable& freq,
                         double seq_avg_freq, const AugmentationConfig& cfg) {
  return item_perturb_prob(static_cast<double>(freq.count(item)), seq_avg_freq,
                           cfg);
}

double len_aware_item_perturb_prob(ItemIndex item, const FrequencyTable& freq,
                                   double seq_avg_freq, std::size_t seq_len,
                                   const CorpusStats& stats,
                                   const AugmentationConfig& cfg) {
  const double rho = item_perturb_prob(item, freq, seq_avg_freq, cfg);
  return clamp01(rho * static_cast<double>(seq_len) / stats.global_avg_length);
}

std::vector<double> perturb_probs(std::span<const ItemIndex> seq,
                                  const FrequencyTable& freq,
                                  const CorpusStats& stats,
                                  const AugmentationConfig& cfg) {
  std::vector<double> probs(seq.size(), clamp01(cfg.gamma));
  if (seq.empty()) return probs;
  const double scale = cfg.length_aware ? static_cast<double>(seq.size()) /
                                              stats.global_avg_length
                                        : 1.0;
  if (cfg.policy == AugmentPolicy::kUniform) {
    for (auto& p : probs) p = clamp01(cfg.gamma * scale);
    return probs;
  }
  const double avg = seq_avg_frequency(seq, freq);
  if (!(avg > 0.0)) return std::vector<double>(seq.size(), 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i)
    probs[i] = clamp01(item_perturb_prob(seq[i], freq, avg, cfg) * scale);
  return probs;
}

// --- correlation index -----------------------------------------------------

bool operator==(const Neighbor& a, const Neighbor& b) {
  return a.item == b.item && a.score == b.score;
}

CorrelationIndex::CorrelationIndex(std::vector<std::vector<Neighbor>> neighbors,
                                   int window, int top_k)
    : neighbors_(std::move(neighbors)), window_(window), top_k_(top_k) {}

bool operator==(const CorrelationIndex& a, const CorrelationIndex& b) {
  return a.window_ == b.window_ && a.top_k_ == b.top_k_ &&
         a.neighbors_ == b.neighbors_;
}

void CorrelationIndex::save(std::ostream& out) const {
  out << "facl-correlation-index 1\n";
  out << "catalog " << neighbors_.size() << " window " << window_ << " top_k "
      << top_k_ << '\n';
  char buf[64];
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    out << i << '\t' << neighbors_[i].size();
    for (const auto& nb : neighbors_[i]) {
      auto res = std::to_chars(buf, buf + sizeof(buf), nb.score);
      out << ' ' << nb.item << ':' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

CorrelationIndex CorrelationIndex::load(std::istream& in) {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::kFormat, "correlation index: " + m);
  };
  std::string line;
  if (!std::getline(in, line) || line != "facl-correlation-index 1")
    fail("unsupported or missing version header");
  std::size_t n = 0;
  int window = 0, top_k = 0;
  {
    if (!std::getline(in, line)) fail("missing catalog line");
    std::istringstream hs(line);
    std::string k1, k2, k3;
    if (!(hs >> k1 >> n >> k2 >> window >> k3 >> top_k) || k1 != "catalog" ||
        k2 != "window" || k3 != "top_k")
      fail("malformed catalog line");
  }
  std::vector<std::vector<Neighbor>> nbs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail("truncated file");
    std::istringstream ls(line);
    std::size_t idx = 0, m = 0;
    if (!(ls >> idx >> m) || idx != i) fail("bad row " + std::to_string(i));
    for (std::size_t j = 0; j < m; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail("bad row " + std::to_string(i));
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail("bad neighbour entry");
      Neighbor nb{};
      auto r1 = std::from_chars(tok.data(), tok.data() + colon, nb.item);
      auto r2 = std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(),
                                nb.score);
      if (r1.ec != std::errc() || r2.ec != std::errc())
        fail("bad neighbour entry");
      nbs[i].push_back(nb);
    }
  }
  return CorrelationIndex(std::move(nbs), window, top_k);
}

CorrelationIndex build_correlation_index(const Corpus& train,
                                         const FrequencyTable& freq,
                                         int window, int top_k) {
  if (train.empty())
    throw Error(ErrorCode::kEmptyResult, "training corpus is empty");
  const std::size_t n_items = train.num_items();
  std::vector<std::unordered_map<ItemIndex, std::int64_t>> co(n_items);
  const auto w = static_cast<std::size_t>(window);
  for (const auto& s : train.sequences) {
    const auto& it = s.items;
    for (std::size_t i = 0; i < it.size(); ++i) {
      const std::size_t end = std::min(it.size(), i + w);
      for (std::size_t j = i + 1; j < end; ++j) {
        if (it[i] == it[j]) continue;
        ++co[static_cast<std::size_t>(it[i])][it[j]];
        ++co[static_cast<std::size_t>(it[j])][it[i]];
      }
    }
  }
  std::vector<std::vector<Neighbor>> nbs(n_items);
  for (std::size_t a = 0; a < n_items; ++a) {
    auto& list = nbs[a];
    list.reserve(co[a].size());
    const double fa = static_cast<double>(freq.count(static_cast<ItemIndex>(a)));
    for (const auto& [b, c] : co[a]) {
      const double fb = static_cast<double>(freq.count(b));
      list.push_back({b, static_cast<double>(c) / std::sqrt(fa * fb)});
    }
    auto better = [](const Neighbor& x, const Neighbor& y) {
      return x.score != y.score ? x.score > y.score : x.item < y.item;
    };
    const auto k = std::min(list.size(), static_cast<std::size_t>(top_k));
    std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k),
                      list.end(), better);
    list.resize(k);
  }
  return CorrelationIndex(std::move(nbs), window, top_k);
}

CorrelationIndex build_correlation_index(const Corpus& train,
                                         const AugmentationConfig& cfg) {
  return build_correlation_index(train, build_frequency_table(train),
                                 cfg.correlation_window, cfg.correlation_top_k);
}

// --- item-oriented operators -----------------------------------------------

Sequence op_drop(std::span<const ItemIndex> seq, std::span<const double> probs,
                 RngStream& rng, std::vector<std::size_t>* perturbed) {
  Sequence out;
  out.reserve(seq.size());
  std::vector<std::size_t> dropped;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (rng.uniform() > probs[i]) {
      out.push_back(seq[i]);
    } else {
      dropped.push_back(i);
    }
  }
  if (out.empty() && !seq.empty()) {
    out.push_back(seq.back());
    dropped.pop_back();
  }
  if (perturbed) *perturbed = std::move(dropped);
  return out;
}

Sequence op_substitute(std::span<const ItemIndex> seq,
                       std::span<const double> probs,
                       const CorrelationIndex& corr, RngStream& rng,
                       std::vector<std::size_t>* perturbed) {
  Sequence out(seq.begin(), seq.end());
  if (perturbed) perturbed->clear();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double z = rng.uniform();
    if (z > probs[i]) continue;
    const auto nbs = corr.neighbors(seq[i]);
    if (nbs.empty()) continue;
    out[i] = nbs[rng.uniform_index(nbs.size())].item;
    if (perturbed) perturbed->push_back(i);
  }
  return out;
}

Sequence op_insert(std::span<const ItemIndex> seq, std::span<const double> probs,
                   const CorrelationIndex& corr, RngStream& rng,
                   std::size_t max_len, std::vector<std::size_t>* perturbed) {
  Sequence out;
  out.reserve(seq.size() * 2);
  if (perturbed) perturbed->clear();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.push_back(seq[i]);
    const double z = rng.uniform();
    if (z > probs[i]) continue;
    const auto nbs = corr.neighbors(seq[i]);
    if (nbs.empty()) continue;
    out.push_back(nbs[rng.uniform_index(nbs.size())].item);
    if (perturbed) perturbed->push_back(i);
  }
  if (out.size() > max_len)
    out.erase(out.begin(),
              out.begin() + static_cast<std::ptrdiff_t>(out.size() - max_len));
  return out;
}

// --- subsequence-oriented operators ----------------------------------------

std::size_t subsequence_length(std::size_t n, double eta) {
  // The small slack keeps products such as 0.3 * 10 from rounding up.
  const double raw = std::ceil(eta * static_cast<double>(n) - 1e-9);
  const auto c = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(c, n);
}

Span sample_subsequence(std::size_t n, double eta, RngStream& rng) {
  const std::size_t c = subsequence_length(n, eta);
  return {rng.uniform_index(n - c + 1), c};
}

double subsequence_accept_prob(std::span<const ItemIndex> span,
                               const FrequencyTable& freq,
                               const CorpusStats& stats) {
  std::int64_t fmin = freq.count(span.front());
  for (ItemIndex v : span) fmin = std::min(fmin, freq.count(v));
  return std::min(static_cast<double>(fmin) / stats.global_avg_frequency, 1.0);
}

double len_aware_accept_prob(std::span<const ItemIndex> span,
                             const FrequencyTable& freq,
                             const CorpusStats& stats, std::size_t seq_len) {
  return clamp01(subsequence_accept_prob(span, freq, stats) *
                 static_cast<double>(seq_len) / stats.global_avg_length);
}

double span_accept_prob(std::span<const ItemIndex> seq, Span span,
                        const FrequencyTable& freq, const CorpusStats& stats,
                        const AugmentationConfig& cfg) {
  const auto sub = seq.subspan(span.start, span.length);
  double alpha = cfg.policy == AugmentPolicy::kUniform
                     ? 1.0
                     : subsequence_accept_prob(sub, freq, stats);
  if (cfg.length_aware)
    alpha = clamp01(alpha * static_cast<double>(seq.size()) /
                    stats.global_avg_length);
  return alpha;
}

Span accepted_subsequence(std::span<const ItemIndex> seq,
                          const AugmentationConfig& cfg,
                          const FrequencyTable& freq, const CorpusStats& stats,
                          RngStream& rng) {
  Span best;
  double best_alpha = -1.0;
  for (int attempt = 0; attempt < cfg.max_resamples; ++attempt) {
    const Span span = sample_subsequence(seq.size(), cfg.eta, rng);
    const double alpha = span_accept_prob(seq, span, freq, stats, cfg);
    if (attempt + 1 == cfg.max_resamples && best_alpha < 0.0) return span;
    if (rng.uniform() <= alpha) return span;
    if (alpha > best_alpha) {
      best_alpha = alpha;
      best = span;
    }
  }
  return best;
}

Sequence op_crop(std::span<const ItemIndex> seq, Span span) {
  const auto sub = seq.subspan(span.start, span.length);
  return Sequence(sub.begin(), sub.end());
}

Sequence op_reorder(std::span<const ItemIndex> seq, Span span, RngStream& rng) {
  Sequence out(seq.begin(), seq.end());
  auto first = out.begin() + static_cast<std::ptrdiff_t>(span.start);
  rng.shuffle(first, first + static_cast<std::ptrdiff_t>(span.length));
  return out;
}

// --- view generation -------------------------------------------------------

Augmenter::Augmenter(const FrequencyTable& freq, const CorpusStats& stats,
                     const CorrelationIndex& corr, AugmentationConfig cfg)
    : freq_(freq), stats_(stats), corr_(corr), cfg_(cfg) {
  cfg_.validate();
}

AugmentedView Augmenter::view(std::span<const ItemIndex> seq,
                              RngStream& rng) const {
  AugmentedView view;
  auto& prov = view.provenance;
  prov.subsequence_op =
      rng.uniform_index(2) == 0 ? SubsequenceOp::kCrop : SubsequenceOp::kReorder;
  prov.item_op = static_cast<ItemOp>(rng.uniform_index(3));

  prov.span = accepted_subsequence(seq, cfg_, freq_, stats_, rng);
  const Sequence mid = prov.subsequence_op == SubsequenceOp::kCrop
                           ? op_crop(seq, prov.span)
                           : op_reorder(seq, prov.span, rng);

  const auto probs = perturb_probs(mid, freq_, stats_, cfg_);
  switch (prov.item_op) {
    case ItemOp::kDrop:
      view.items = op_drop(mid, probs, rng, &prov.positions);
      break;
    case ItemOp::kSubstitute:
      view.items = op_substitute(mid, probs, corr_, rng, &prov.positions);
      break;
    case ItemOp::kInsert:
      view.items =
          op_insert(mid, probs, corr_, rng, cfg_.max_len, &prov.positions);
      break;
  }
  return view;
}

AugmentedViewPair Augmenter::views(std::span<const ItemIndex> seq,
                                   RngStream& first, RngStream& second) const {
  return {view(seq, first), view(seq, second)};
}

}  // namespace facl
