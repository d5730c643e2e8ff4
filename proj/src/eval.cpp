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

#include "facl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace facl {

template <typename Scalar>
std::size_t rank_target(const RowVectorX<Scalar>& scores, ItemIndex target) {
  const Scalar t = scores(target);
  std::size_t rank = 1;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    const Scalar s = scores(j);
    if (s > t || (s == t && j < target)) ++rank;
  }
  return rank;
}

double hr_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r : ranks) hits += r <= k;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double ndcg_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r : ranks)
    if (r <= k) sum += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  return sum / static_cast<double>(ranks.size());
}

template <typename Scalar>
std::vector<std::size_t> rank_examples(std::span<const LabeledExample> examples,
                                       const ModelParams<Scalar>& params,
                                       const ModelConfig& cfg,
                                       std::size_t batch_size) {
  std::vector<std::size_t> ranks(examples.size());
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t lo = 0; lo < examples.size(); lo += batch_size) {
    const std::size_t hi = std::min(examples.size(), lo + batch_size);
    SequenceBatch batch;
    for (std::size_t i = lo; i < hi; ++i) {
      std::span<const ItemIndex> in = examples[i].input;
      if (in.size() > cfg.max_len) in = in.last(cfg.max_len);
      batch.add(in);
    }
    const MatrixX<Scalar> h =
        encode_batch<Scalar>(batch, params, cfg, Mode::kEval, {}, nullptr);
    const MatrixX<Scalar> logits = item_logits(h, params);
    for (std::size_t i = lo; i < hi; ++i) {
      const RowVectorX<Scalar> row = logits.row(static_cast<Eigen::Index>(i - lo));
      ranks[i] = rank_target<Scalar>(row, examples[i].target);
    }
  }
  return ranks;
}

const MetricAtK& EvalReport::at(std::size_t k) const {
  for (const auto& m : overall)
    if (m.k == k) return m;
  throw Error(ErrorCode::kInvalidArgument, "metric at K=" + std::to_string(k) + " not evaluated");
}

const BinMetrics& EvalReport::bin(const std::string& kind, const std::string& label) const {
  for (const auto& b : bins)
    if (b.kind == kind && b.label == label) return b;
  throw Error(ErrorCode::kInvalidArgument, "no " + kind + " bin '" + label + "'");
}

EvalReport binned_metrics(std::span<const std::size_t> ranks,
                          std::span<const LabeledExample> examples,
                          const Corpus& train, const FrequencyBins& item_bins,
                          const FrequencyBins& user_bins,
                          std::span<const std::size_t> ks) {
  if (ranks.size() != examples.size())
    throw Error(ErrorCode::kInvalidArgument, "ranks and examples differ in length");
  static constexpr std::size_t kDefaultKs[] = {5, 10};
  if (ks.empty()) ks = kDefaultKs;

  EvalReport report;
  report.num_examples = ranks.size();
  for (std::size_t k : ks) report.overall.push_back({k, hr_at_k(ranks, k), ndcg_at_k(ranks, k)});

  auto add_bins = [&](const std::string& kind, const FrequencyBins& bins, auto bin_of_example) {
    std::vector<std::vector<std::size_t>> grouped(bins.num_bins());
    for (std::size_t i = 0; i < ranks.size(); ++i) grouped[bin_of_example(i)].push_back(ranks[i]);
    for (std::size_t b = 0; b < bins.num_bins(); ++b) {
      BinMetrics m{kind, bins.labels[b], grouped[b].size(), std::nullopt, std::nullopt};
      if (!grouped[b].empty()) {
        m.hr10 = hr_at_k(grouped[b], 10);
        m.ndcg10 = ndcg_at_k(grouped[b], 10);
      }
      report.bins.push_back(std::move(m));
    }
  };
  add_bins("item", item_bins, [&](std::size_t i) {
    return item_bins.item_bin[static_cast<std::size_t>(examples[i].target)];
  });
  add_bins("user", user_bins, [&](std::size_t i) {
    const auto len = train.sequences[examples[i].user].items.size();
    return user_bins.bin_of(static_cast<std::int64_t>(len));
  });
  return report;
}

FrequencyBins default_item_bins(const FrequencyTable& freq) {
  return assign_frequency_bins(freq, item_tercile_edges(freq));
}

FrequencyBins default_user_bins(const Corpus& train) {
  std::vector<std::int64_t> lengths;
  lengths.reserve(train.num_users());
  for (const auto& s : train.sequences) lengths.push_back(static_cast<std::int64_t>(s.items.size()));
  FrequencyBins bins;
  bins.edges = tercile_edges(lengths);
  bins.labels = default_bin_labels(bins.num_bins());
  return bins;
}

namespace {

void audit_op(ItemOp op, std::uint64_t key, const Corpus& train,
              const FrequencyTable& freq, const CorpusStats& stats,
              const CorrelationIndex& corr, const FrequencyBins& bins,
              const AugmentationConfig& cfg, std::size_t trials,
              std::uint64_t seed, std::vector<AuditRow>& rows) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "audit needs a non-empty corpus");
  RngStream rng(seed, key, 0, StreamTag::kAudit);
  std::vector<std::size_t> seen(bins.num_bins(), 0), hit(bins.num_bins(), 0);
  std::vector<double> expected(bins.num_bins(), 0.0);
  std::vector<std::size_t> touched;
  std::vector<char> mark;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& seq = train.sequences[rng.uniform_index(train.num_users())].items;
    const auto probs = perturb_probs(seq, freq, stats, cfg);
    switch (op) {
      case ItemOp::kDrop: op_drop(seq, probs, rng, &touched); break;
      case ItemOp::kSubstitute: op_substitute(seq, probs, corr, rng, &touched); break;
      case ItemOp::kInsert:
        op_insert(seq, probs, corr, rng, std::numeric_limits<std::size_t>::max(), &touched);
        break;
    }
    mark.assign(seq.size(), 0);
    for (std::size_t i : touched) mark[i] = 1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::size_t b = bins.item_bin[static_cast<std::size_t>(seq[i])];
      ++seen[b];
      hit[b] += mark[i];
      if (op == ItemOp::kDrop || !corr.neighbors(seq[i]).empty()) expected[b] += probs[i];
    }
  }
  for (std::size_t b = 0; b < bins.num_bins(); ++b) {
    AuditRow row{bins.labels[b], std::string(to_string(op)), 0.0, 0.0, seen[b]};
    if (seen[b] > 0) {
      row.expected_rate = expected[b] / static_cast<double>(seen[b]);
      row.observed_rate = static_cast<double>(hit[b]) / static_cast<double>(seen[b]);
    }
    rows.push_back(std::move(row));
  }
}

}  // namespace

std::vector<AuditRow> perturb_audit(const Corpus& train,
                                    const FrequencyTable& freq,
                                    const CorpusStats& stats,
                                    const CorrelationIndex& corr,
                                    const FrequencyBins& bins,
                                    const AugmentationConfig& cfg,
                                    std::size_t trials, std::uint64_t seed) {
  std::vector<AuditRow> rows;
  const ItemOp ops[] = {ItemOp::kDrop, ItemOp::kSubstitute, ItemOp::kInsert};
  for (std::size_t o = 0; o < 3; ++o)
    audit_op(ops[o], o, train, freq, stats, corr, bins, cfg, trials, seed, rows);
  return rows;
}

std::vector<AuditRow> drop_audit(const Corpus& train, const FrequencyTable& freq,
                                 const CorpusStats& stats,
                                 const FrequencyBins& bins,
                                 const AugmentationConfig& cfg,
                                 std::size_t trials, std::uint64_t seed) {
  std::vector<AuditRow> rows;
  audit_op(ItemOp::kDrop, 0, train, freq, stats, CorrelationIndex{}, bins, cfg, trials, seed,
           rows);
  return rows;
}

template std::size_t rank_target<float>(const RowVectorX<float>&, ItemIndex);
template std::size_t rank_target<double>(const RowVectorX<double>&, ItemIndex);
template std::vector<std::size_t> rank_examples<float>(
    std::span<const LabeledExample>, const ModelParams<float>&, const ModelConfig&, std::size_t);
template std::vector<std::size_t> rank_examples<double>(
    std::span<const LabeledExample>, const ModelParams<double>&, const ModelConfig&, std::size_t);

}  // namespace facl
