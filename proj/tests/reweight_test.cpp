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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "facl/reweight.hpp"

namespace facl {
namespace {

// Items 0..3 with counts 10, 5, 20, 1; global averages f = 10, l = 4.
struct Fixture {
  FrequencyTable freq{std::vector<std::int64_t>{10, 5, 20, 1}};
  CorpusStats stats{10.0, 4.0};
};

ReweightConfig with_beta(double beta, bool clip = true) {
  ReweightConfig cfg;
  cfg.beta = beta;
  cfg.clip = clip;
  return cfg;
}

TEST(SequenceWeight, Examples) {
  Fixture f;
  EXPECT_DOUBLE_EQ(sequence_avg_frequency(Sequence{0, 1, 2}, f.freq), 35.0 / 3);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{0, 0, 0, 0}, f.freq, f.stats, with_beta(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{1, 1, 1, 1}, f.freq, f.stats, with_beta(1.0)), 2.0);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{0, 0}, f.freq, f.stats, with_beta(1.0)), 2.0);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{2, 2, 2, 2}, f.freq, f.stats, with_beta(0.5)),
                   std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{1, 3}, f.freq, f.stats, with_beta(0.0)), 1.0);
}

TEST(SequenceWeight, ClipBounds) {
  Fixture f;
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{3}, f.freq, f.stats, with_beta(1.0)), 10.0);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence{3}, f.freq, f.stats, with_beta(1.0, false)), 40.0);
  EXPECT_DOUBLE_EQ(sequence_weight(Sequence(40, 2), f.freq, f.stats, with_beta(1.0)), 0.1);
}

TEST(SequenceWeight, DisabledIsExactlyOne) {
  Fixture f;
  ReweightConfig cfg = with_beta(3.0);
  cfg.enabled = false;
  EXPECT_EQ(sequence_weight(Sequence{3}, f.freq, f.stats, cfg), 1.0);
}

TEST(SequenceWeight, MonotoneInFrequency) {
  Fixture f;
  for (double beta : {0.1, 0.5, 1.0}) {
    const double rare = sequence_weight(Sequence{3, 1, 0}, f.freq, f.stats, with_beta(beta, false));
    const double mid = sequence_weight(Sequence{1, 1, 0}, f.freq, f.stats, with_beta(beta, false));
    const double common = sequence_weight(Sequence{2, 1, 0}, f.freq, f.stats, with_beta(beta, false));
    EXPECT_GT(rare, mid);
    EXPECT_GT(mid, common);
    // Shorter sequences get larger weights at equal average frequency.
    EXPECT_GT(sequence_weight(Sequence{0}, f.freq, f.stats, with_beta(beta, false)),
              sequence_weight(Sequence{0, 0}, f.freq, f.stats, with_beta(beta, false)));
  }
}

TEST(SequenceWeight, ExponentAdditivity) {
  Fixture f;
  const Sequence seq{1, 3, 2};
  for (double b1 : {0.1, 0.4}) {
    for (double b2 : {0.2, 0.7}) {
      const double lhs = sequence_weight(seq, f.freq, f.stats, with_beta(b1 + b2, false));
      const double rhs = sequence_weight(seq, f.freq, f.stats, with_beta(b1, false)) *
                         sequence_weight(seq, f.freq, f.stats, with_beta(b2, false));
      EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
    }
  }
}

TEST(BatchWeights, NormalizeGivesUnitMean) {
  Fixture f;
  const std::vector<Sequence> seqs{{0, 1}, {3}, {2, 2, 2}};
  ReweightConfig cfg = with_beta(1.0);
  const auto raw = batch_weights(seqs, f.freq, f.stats, cfg);
  for (std::size_t i = 0; i < seqs.size(); ++i)
    EXPECT_DOUBLE_EQ(raw[i], sequence_weight(seqs[i], f.freq, f.stats, cfg));
  cfg.normalize = true;
  const auto norm = batch_weights(seqs, f.freq, f.stats, cfg);
  EXPECT_NEAR(std::accumulate(norm.begin(), norm.end(), 0.0) / 3.0, 1.0, 1e-12);
}

TEST(WeightHistogram, CountsEveryWeight) {
  const std::vector<double> w{0.1, 0.5, 0.5, 2.0, 10.0};
  const auto hist = weight_histogram(w, 4);
  ASSERT_EQ(hist.size(), 4u);
  std::size_t total = 0;
  for (const auto& b : hist) total += b.count;
  EXPECT_EQ(total, w.size());
  EXPECT_DOUBLE_EQ(hist.front().lower, 0.1);
  EXPECT_DOUBLE_EQ(hist.back().upper, 10.0);
  EXPECT_EQ(hist.back().count, 1u);
}

}  // namespace
}  // namespace facl
