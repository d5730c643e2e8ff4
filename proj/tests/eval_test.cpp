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

#include "facl/eval.hpp"
#include "facl/synth.hpp"
#include "oracles.hpp"

namespace facl {
namespace {

TEST(RankTarget, Examples) {
  RowVectorX<double> s(4);
  s << 0.1, 0.9, 0.3, 0.2;
  EXPECT_EQ(rank_target(s, 1), 1u);
  EXPECT_EQ(rank_target(s, 0), 4u);
  const RowVectorX<double> flat = RowVectorX<double>::Constant(5, 2.0);
  EXPECT_EQ(rank_target(flat, 0), 1u);
  EXPECT_EQ(rank_target(flat, 3), 4u);
}

TEST(RankTarget, MatchesSortOracle) {
  RngStream rng(17);
  for (int t = 0; t < 1000; ++t) {
    RowVectorX<double> s(10);
    std::vector<double> v(10);
    for (int i = 0; i < 10; ++i) {
      // Coarse values so ties are common.
      v[static_cast<std::size_t>(i)] = s(i) = static_cast<double>(rng.uniform_index(6));
    }
    const auto target = rng.uniform_index(10);
    ASSERT_EQ(rank_target(s, static_cast<ItemIndex>(target)), oracle::sort_rank(v, target));
  }
}

TEST(Metrics, Examples) {
  EXPECT_EQ(hr_at_k(std::vector<std::size_t>{1}, 5), 1.0);
  EXPECT_EQ(hr_at_k(std::vector<std::size_t>{7}, 5), 0.0);
  EXPECT_EQ(hr_at_k(std::vector<std::size_t>{7}, 10), 1.0);
  EXPECT_DOUBLE_EQ(hr_at_k(std::vector<std::size_t>{1, 6, 11}, 10), 2.0 / 3);
  EXPECT_EQ(ndcg_at_k(std::vector<std::size_t>{1}, 10), 1.0);
  EXPECT_NEAR(ndcg_at_k(std::vector<std::size_t>{2}, 2), 0.63093, 1e-5);
  EXPECT_EQ(ndcg_at_k(std::vector<std::size_t>{6}, 5), 0.0);
}

TEST(Metrics, MatchOracleAndAreOrdered) {
  RngStream rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::size_t> ranks(1 + rng.uniform_index(30));
    for (auto& r : ranks) r = 1 + rng.uniform_index(40);
    double prev_hr = 0, prev_ndcg = 0;
    for (std::size_t k = 1; k <= 40; ++k) {
      const double hr = hr_at_k(ranks, k), nd = ndcg_at_k(ranks, k);
      EXPECT_NEAR(hr, oracle::hr(ranks, k), 1e-12);
      EXPECT_NEAR(nd, oracle::ndcg(ranks, k), 1e-12);
      EXPECT_LE(nd, hr + 1e-15);
      EXPECT_GE(hr, prev_hr);
      EXPECT_GE(nd, prev_ndcg);
      prev_hr = hr;
      prev_ndcg = nd;
    }
  }
}

// Three training users and six scored examples with hand-computed bins.
struct BinFixture {
  Corpus train = parse_interactions("a\t1 1 1 1 1 2 2 3\nb\t1 1 2\nc\t1 4 4 2 3\n");
  FrequencyTable freq = build_frequency_table(train);
  FrequencyBins items = assign_frequency_bins(freq, std::vector<std::int64_t>{3, 6});
  FrequencyBins users;
  std::vector<LabeledExample> examples;
  std::vector<std::size_t> ranks{1, 12, 3, 10, 11, 2};

  BinFixture() {
    users.edges = {4, 7};
    users.labels = default_bin_labels(3);
    auto id = [&](std::int64_t raw) {
      for (std::size_t i = 0; i < train.item_ids.size(); ++i)
        if (train.item_ids[i] == raw) return static_cast<ItemIndex>(i);
      throw std::logic_error("unknown id");
    };
    const std::vector<std::pair<std::size_t, std::int64_t>> rows{{0, 1}, {0, 3}, {1, 4},
                                                                 {2, 2}, {2, 1}, {1, 3}};
    for (const auto& [user, raw] : rows) examples.push_back({user, {}, id(raw)});
  }
};

double inv_log2(double r) { return 1.0 / std::log2(r + 1.0); }

TEST(BinnedMetrics, HandComputedFixture) {
  BinFixture f;
  const EvalReport r = binned_metrics(f.ranks, f.examples, f.train, f.items, f.users);
  EXPECT_EQ(r.num_examples, 6u);
  EXPECT_DOUBLE_EQ(r.at(10).hr, 4.0 / 6);
  EXPECT_DOUBLE_EQ(r.at(5).hr, 3.0 / 6);

  const auto& low = r.bin("item", "low");
  EXPECT_EQ(low.count, 3u);
  EXPECT_DOUBLE_EQ(*low.hr10, 2.0 / 3);
  EXPECT_NEAR(*low.ndcg10, (inv_log2(3) + inv_log2(2)) / 3, 1e-15);
  const auto& med = r.bin("item", "medium");
  EXPECT_EQ(med.count, 1u);
  EXPECT_DOUBLE_EQ(*med.hr10, 1.0);
  EXPECT_NEAR(*med.ndcg10, inv_log2(10), 1e-15);
  const auto& high = r.bin("item", "high");
  EXPECT_EQ(high.count, 2u);
  EXPECT_DOUBLE_EQ(*high.hr10, 0.5);
  EXPECT_DOUBLE_EQ(*high.ndcg10, 0.5);

  EXPECT_DOUBLE_EQ(*r.bin("user", "low").hr10, 1.0);
  EXPECT_NEAR(*r.bin("user", "low").ndcg10, (inv_log2(3) + inv_log2(2)) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(*r.bin("user", "medium").hr10, 0.5);
  EXPECT_NEAR(*r.bin("user", "medium").ndcg10, inv_log2(10) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(*r.bin("user", "high").hr10, 0.5);

  std::size_t item_total = 0, user_total = 0;
  for (const auto& b : r.bins) (b.kind == "item" ? item_total : user_total) += b.count;
  EXPECT_EQ(item_total, 6u);
  EXPECT_EQ(user_total, 6u);
}

TEST(BinnedMetrics, EmptyBinIsAbsent) {
  BinFixture f;
  const FrequencyBins one_bin = assign_frequency_bins(f.freq, std::vector<std::int64_t>{100, 200});
  const EvalReport r = binned_metrics(f.ranks, f.examples, f.train, one_bin, f.users);
  EXPECT_FALSE(r.bin("item", "medium").hr10.has_value());
  EXPECT_EQ(r.bin("item", "medium").count, 0u);
  EXPECT_FALSE(r.bin("item", "high").ndcg10.has_value());
  // Everything in one bin: that bin equals the overall metric.
  EXPECT_DOUBLE_EQ(*r.bin("item", "low").hr10, r.at(10).hr);
  EXPECT_DOUBLE_EQ(*r.bin("item", "low").ndcg10, r.at(10).ndcg);
}

struct AuditFixture {
  Corpus train = generate_synthetic(SyntheticSpec{});
  FrequencyTable freq = build_frequency_table(train);
  CorpusStats stats = corpus_stats(train, freq);
  FrequencyBins bins = default_item_bins(freq);
};

TEST(DropAudit, ZeroGammaNeverDrops) {
  AuditFixture f;
  AugmentationConfig cfg;
  cfg.gamma = 0.0;
  for (const auto& row : drop_audit(f.train, f.freq, f.stats, f.bins, cfg, 2000, 1)) {
    EXPECT_EQ(row.observed_rate, 0.0);
    EXPECT_EQ(row.expected_rate, 0.0);
  }
}

TEST(DropAudit, UniformPolicyMatchesGamma) {
  AuditFixture f;
  AugmentationConfig cfg;
  cfg.policy = AugmentPolicy::kUniform;
  const auto rows = drop_audit(f.train, f.freq, f.stats, f.bins, cfg, 100000, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) EXPECT_NEAR(row.observed_rate, 0.3, 0.02) << row.bin_label;
}

TEST(DropAudit, AdaptivePolicyProtectsRareItems) {
  AuditFixture f;
  const AugmentationConfig cfg;
  const auto rows = drop_audit(f.train, f.freq, f.stats, f.bins, cfg, 100000, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].observed_rate, cfg.gamma);
  EXPECT_GT(rows[2].observed_rate, rows[0].observed_rate);
  EXPECT_LE(rows[2].observed_rate, 2 * cfg.gamma + 0.02);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_GE(rows[i].observed_rate, rows[i - 1].observed_rate - 0.02);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.observed_rate, row.expected_rate, 0.02) << row.bin_label;
    EXPECT_GT(row.trials, 0u);
  }
}

TEST(PerturbAudit, ReportsAllOperators) {
  AuditFixture f;
  const AugmentationConfig cfg;
  const CorrelationIndex corr = build_correlation_index(f.train, cfg);
  const auto rows = perturb_audit(f.train, f.freq, f.stats, corr, f.bins, cfg, 20000, 4);
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& row : rows) EXPECT_NEAR(row.observed_rate, row.expected_rate, 0.03) << row.op;
}

}  // namespace
}  // namespace facl
