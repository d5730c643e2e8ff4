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
#include <functional>
#include <optional>
#include <vector>

#include "facl/augment.hpp"
#include "facl/corpus.hpp"
#include "facl/model.hpp"
#include "facl/objective.hpp"
#include "facl/optim.hpp"
#include "facl/reweight.hpp"

namespace facl {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  int epochs = 50;
  int patience = 5;  // early stop after this many non-improving epochs
  std::uint64_t seed = 42;
  double grad_clip = 5.0;  // global norm; <= 0 disables
  bool contrastive = true;  // false: recommendation loss only, no views
  bool all_prefixes = false;
  AdamConfig adam;

  void validate() const;
};

// Everything that shapes a training run.
struct RunConfig {
  AugmentationConfig augment;
  ReweightConfig reweight;
  ModelConfig model;
  LossConfig loss;
  TrainConfig train;

  void validate() const;
};

struct TrainExample {
  std::size_t key = 0;   // seeds the per-example random streams
  std::size_t user = 0;  // index into the training corpus
  Sequence input;
  ItemIndex target = 0;
};

// One example per user (all items but the last -> last item), or every
// prefix when all_prefixes is set. Sequences shorter than two items yield
// nothing. Inputs keep their most recent max_len items.
std::vector<TrainExample> training_examples(const Corpus& train,
                                            bool all_prefixes,
                                            std::size_t max_len);

struct EpochStats {
  int epoch = 0;
  double rec_loss = 0.0;  // example-weighted means over batches
  double cl_loss = 0.0;
  double total = 0.0;
  double mean_lambda = 0.0;
  std::optional<double> valid_ndcg10;
  double seconds = 0.0;
  std::size_t batches = 0;
  std::size_t skipped_batches = 0;
};

// Read-only data shared by every epoch of a run.
struct TrainingData {
  const Split& split;
  const FrequencyTable& freq;
  const CorpusStats& stats;
  const CorrelationIndex& corr;
  std::vector<TrainExample> examples;

  TrainingData(const Split& split, const FrequencyTable& freq,
               const CorpusStats& stats, const CorrelationIndex& corr,
               const RunConfig& cfg);
};

// One pass over the shuffled training examples.
EpochStats train_epoch(const TrainingData& data, const RunConfig& cfg,
                       ModelParams<double>& params, AdamState<double>& state,
                       int epoch);

struct FitResult {
  ModelParams<double> best;
  ModelParams<double> final_params;
  int best_epoch = 0;
  double best_ndcg10 = 0.0;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Trains for up to cfg.train.epochs, scoring validation NDCG@10 after every
// epoch. Stops once more than `patience` consecutive epochs fail to improve
// on the best score.
FitResult fit(const TrainingData& data, const RunConfig& cfg,
              const EpochCallback& on_epoch = {});

}  // namespace facl
