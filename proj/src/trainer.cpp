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

#include "facl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <numeric>

#include "facl/eval.hpp"

namespace facl {

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, "train: " + m); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (batch_size < 2) fail("batch_size must be >= 2");
  if (epochs < 1) fail("epochs must be >= 1");
  if (patience < 0) fail("patience must be >= 0");
}

void RunConfig::validate() const {
  augment.validate();
  reweight.validate();
  model.validate();
  loss.validate();
  train.validate();
  if (augment.max_len != model.max_len)
    throw Error(ErrorCode::kConfig, "augmentation and model max_len differ");
}

std::vector<TrainExample> training_examples(const Corpus& train,
                                            bool all_prefixes,
                                            std::size_t max_len) {
  std::vector<TrainExample> out;
  auto add = [&](std::size_t user, std::span<const ItemIndex> items, std::size_t end) {
    std::span<const ItemIndex> in = items.first(end);
    if (in.size() > max_len) in = in.last(max_len);
    out.push_back({out.size(), user, Sequence(in.begin(), in.end()), items[end]});
  };
  for (std::size_t u = 0; u < train.num_users(); ++u) {
    const Sequence& items = train.sequences[u].items;
    if (items.size() < 2) continue;
    if (all_prefixes) {
      for (std::size_t end = 1; end < items.size(); ++end) add(u, items, end);
    } else {
      add(u, items, items.size() - 1);
    }
  }
  return out;
}

TrainingData::TrainingData(const Split& split, const FrequencyTable& freq,
                           const CorpusStats& stats, const CorrelationIndex& corr,
                           const RunConfig& cfg)
    : split(split), freq(freq), stats(stats), corr(corr),
      examples(training_examples(split.train, cfg.train.all_prefixes, cfg.model.max_len)) {
  if (examples.empty())
    throw Error(ErrorCode::kEmptyResult, "no training examples (every sequence is shorter than 2)");
}

namespace {

std::vector<RngStream> streams_for(std::span<const std::size_t> keys, std::uint64_t seed,
                                   int epoch, StreamTag tag) {
  std::vector<RngStream> out;
  out.reserve(keys.size());
  for (std::size_t k : keys) out.emplace_back(seed, k, static_cast<std::uint64_t>(epoch), tag);
  return out;
}

}  // namespace

EpochStats train_epoch(const TrainingData& data, const RunConfig& cfg,
                       ModelParams<double>& params, AdamState<double>& state,
                       int epoch) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainConfig& tc = cfg.train;
  const auto ep = static_cast<std::uint64_t>(epoch);

  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream shuffle(tc.seed, 0, ep, StreamTag::kShuffle);
  shuffle.shuffle(order.begin(), order.end());

  const Augmenter augmenter(data.freq, data.stats, data.corr, cfg.augment);
  EpochStats stats;
  stats.epoch = epoch;
  double rec_sum = 0.0, cl_sum = 0.0, total_sum = 0.0, lambda_sum = 0.0;
  std::size_t seen = 0;

  ModelParams<double> grads = ModelParams<double>::zeros_like(params);
  for (std::size_t lo = 0; lo < order.size(); lo += tc.batch_size) {
    const std::size_t hi = std::min(order.size(), lo + tc.batch_size);
    if (hi - lo < 2) {
      std::cerr << "warning: skipping batch with a single sequence\n";
      ++stats.skipped_batches;
      continue;
    }
    std::vector<std::size_t> keys;
    std::vector<Sequence> inputs;
    std::vector<ItemIndex> targets;
    SequenceBatch original;
    for (std::size_t i = lo; i < hi; ++i) {
      const TrainExample& ex = data.examples[order[i]];
      keys.push_back(ex.key);
      inputs.push_back(ex.input);
      targets.push_back(ex.target);
      original.add(ex.input);
    }
    const std::vector<double> weights =
        batch_weights(inputs, data.freq, data.stats, cfg.reweight);

    auto drop_orig = streams_for(keys, tc.seed, epoch, StreamTag::kDropoutOriginal);
    ForwardRecord<double> rec_orig;
    const MatrixX<double> h = encode_batch<double>(original, params, cfg.model, Mode::kTrain,
                                                   drop_orig, &rec_orig);

    ForwardRecord<double> rec_v1, rec_v2;
    MatrixX<double> h1, h2;
    if (tc.contrastive) {
      SequenceBatch b1, b2;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        RngStream r1(tc.seed, keys[i], ep, StreamTag::kView0);
        RngStream r2(tc.seed, keys[i], ep, StreamTag::kView1);
        const AugmentedViewPair pair = augmenter.views(inputs[i], r1, r2);
        b1.add(pair.first.items);
        b2.add(pair.second.items);
      }
      auto drop1 = streams_for(keys, tc.seed, epoch, StreamTag::kDropoutView0);
      auto drop2 = streams_for(keys, tc.seed, epoch, StreamTag::kDropoutView1);
      h1 = encode_batch<double>(b1, params, cfg.model, Mode::kTrain, drop1, &rec_v1);
      h2 = encode_batch<double>(b2, params, cfg.model, Mode::kTrain, drop2, &rec_v2);
    }

    const ObjectiveResult<double> obj = evaluate_objective<double>(
        h, tc.contrastive ? &h1 : nullptr, tc.contrastive ? &h2 : nullptr, targets, weights,
        params.item_embeddings, cfg.loss);

    grads.set_zero();
    grads.item_embeddings += obj.d_item_embeddings;
    backward_batch<double>(params, cfg.model, rec_orig, obj.d_repr, grads);
    if (tc.contrastive) {
      backward_batch<double>(params, cfg.model, rec_v1, obj.d_view1, grads);
      backward_batch<double>(params, cfg.model, rec_v2, obj.d_view2, grads);
    }
    check_finite(grads, "gradient");
    if (tc.grad_clip > 0.0) clip_global_norm(grads, tc.grad_clip);
    AdamConfig adam = tc.adam;
    adam.learning_rate = tc.learning_rate;
    adam_step(params, grads, state, adam);

    const auto n = static_cast<double>(hi - lo);
    rec_sum += obj.rec_mean * n;
    cl_sum += obj.cl_mean * n;
    total_sum += obj.total * n;
    for (double w : weights) lambda_sum += w;
    seen += hi - lo;
    ++stats.batches;
  }
  if (seen > 0) {
    const auto n = static_cast<double>(seen);
    stats.rec_loss = rec_sum / n;
    stats.cl_loss = cl_sum / n;
    stats.total = total_sum / n;
    stats.mean_lambda = lambda_sum / n;
  }
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

FitResult fit(const TrainingData& data, const RunConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  FitResult result;
  ModelParams<double> params = init_params<double>(cfg.model, cfg.train.seed);
  AdamState<double> state = AdamState<double>::for_params(params);
  result.best = params;
  bool have_best = false;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.train.epochs; ++epoch) {
    EpochStats stats = train_epoch(data, cfg, params, state, epoch);
    const auto t0 = std::chrono::steady_clock::now();
    const auto ranks = rank_examples<double>(data.split.valid, params, cfg.model);
    const double ndcg = ndcg_at_k(ranks, 10);
    stats.valid_ndcg10 = ndcg;
    stats.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (!have_best || ndcg > result.best_ndcg10) {
      have_best = true;
      result.best = params;
      result.best_epoch = epoch;
      result.best_ndcg10 = ndcg;
      since_best = 0;
    } else if (++since_best > cfg.train.patience) {
      break;
    }
  }
  result.final_params = std::move(params);
  return result;
}

}  // namespace facl
