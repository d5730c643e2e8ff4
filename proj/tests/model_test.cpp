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

#include "facl/model.hpp"
#include "gradient_check.hpp"

namespace facl {
namespace {

ModelConfig small_config(EncoderKind kind = EncoderKind::kSelfAttention) {
  ModelConfig cfg;
  cfg.num_items = 20;
  cfg.embed_dim = 8;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.max_len = 8;
  cfg.dropout_rate = 0.0;
  cfg.encoder_kind = kind;
  return cfg;
}

TEST(InitParams, ShapesAndDeterminism) {
  ModelConfig cfg;
  cfg.num_items = 100;
  const auto a = init_params<double>(cfg, 3);
  const auto b = init_params<double>(cfg, 3);
  EXPECT_EQ(a.item_embeddings.rows(), 100);
  EXPECT_EQ(a.item_embeddings.cols(), 64);
  EXPECT_EQ(a.positional_embeddings.rows(), 50);
  ASSERT_EQ(a.blocks.size(), 2u);
  EXPECT_EQ(a.blocks[0].w1.cols(), 256);
  EXPECT_EQ(a.item_embeddings, b.item_embeddings);
  EXPECT_EQ(a.blocks[1].wo, b.blocks[1].wo);
  EXPECT_NE(a.item_embeddings, init_params<double>(cfg, 4).item_embeddings);
  EXPECT_TRUE((a.blocks[0].ln1_gain.array() == 1.0).all());
  EXPECT_TRUE((a.final_bias.array() == 0.0).all());
  EXPECT_EQ(a.pool_weight.size(), 0);
}

TEST(InitParams, ZeroMeanWithInverseSqrtScale) {
  ModelConfig cfg;
  cfg.num_items = 500;
  const auto p = init_params<double>(cfg, 11);
  const double d = 64;
  for_each_tensor(p, [&](const std::string& name, const auto& t) {
    if (t.size() == 0 || name.find("gain") != std::string::npos ||
        name.find("_b") != std::string::npos || name.find(".b") != std::string::npos)
      return;
    const double n = static_cast<double>(t.size());
    EXPECT_LT(std::abs(t.mean()), 5.0 / std::sqrt(n * d)) << name;
    const double sd = std::sqrt((t.array() - t.mean()).square().sum() / n);
    EXPECT_NEAR(sd, 1.0 / std::sqrt(d), 0.15 / std::sqrt(d)) << name;
  });
}

TEST(EmbedSequence, AdditiveComposition) {
  const ModelConfig cfg = small_config();
  auto p = init_params<double>(cfg, 1);
  const Sequence seq{4, 7, 4};
  const MatrixX<double> e = embed_sequence<double>(seq, p);
  const RowVectorX<double> gap =
      (e.row(0) - e.row(2)) - (p.positional_embeddings.row(0) - p.positional_embeddings.row(2));
  EXPECT_LT(gap.cwiseAbs().maxCoeff(), 1e-15);

  auto zero_items = p;
  zero_items.item_embeddings.setZero();
  EXPECT_EQ(embed_sequence<double>(seq, zero_items), p.positional_embeddings.topRows(3));
  auto zero_pos = p;
  zero_pos.positional_embeddings.setZero();
  const MatrixX<double> items = embed_sequence<double>(seq, zero_pos);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(items.row(i), p.item_embeddings.row(seq[static_cast<std::size_t>(i)]));
}

TEST(EmbedSequence, Errors) {
  const auto p = init_params<double>(small_config(), 1);
  try {
    embed_sequence<double>(Sequence{1, 20}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfVocabulary);
  }
  EXPECT_THROW(embed_sequence<double>(Sequence(9, 1), p), Error);
}

TEST(Encode, MeanPoolSingleRowIdentity) {
  ModelConfig cfg = small_config(EncoderKind::kMeanPool);
  auto p = init_params<double>(cfg, 2);
  p.pool_weight.setIdentity();
  p.pool_bias.setZero();
  const MatrixX<double> e = embed_sequence<double>(Sequence{5}, p);
  EXPECT_EQ(encode<double>(e, p, cfg, Mode::kEval, nullptr), e.row(0));
}

TEST(Encode, EvalIsDeterministic) {
  ModelConfig cfg = small_config();
  cfg.dropout_rate = 0.3;
  const auto p = init_params<double>(cfg, 2);
  const MatrixX<double> e = embed_sequence<double>(Sequence{1, 2, 3, 4}, p);
  EXPECT_EQ(encode<double>(e, p, cfg, Mode::kEval, nullptr), encode<double>(e, p, cfg, Mode::kEval, nullptr));
}

TEST(Encode, ZeroDropoutTrainEqualsEval) {
  const ModelConfig cfg = small_config();
  const auto p = init_params<double>(cfg, 2);
  const MatrixX<double> e = embed_sequence<double>(Sequence{1, 2, 3, 4}, p);
  RngStream rng(1);
  EXPECT_EQ(encode<double>(e, p, cfg, Mode::kTrain, &rng), encode<double>(e, p, cfg, Mode::kEval, nullptr));
}

TEST(Encode, DropoutIsKeyedByStream) {
  ModelConfig cfg = small_config();
  cfg.dropout_rate = 0.5;
  const auto p = init_params<double>(cfg, 2);
  const MatrixX<double> e = embed_sequence<double>(Sequence{1, 2, 3, 4}, p);
  RngStream a(5), b(5), c(6);
  const auto ha = encode<double>(e, p, cfg, Mode::kTrain, &a);
  EXPECT_EQ(ha, encode<double>(e, p, cfg, Mode::kTrain, &b));
  EXPECT_NE(ha, encode<double>(e, p, cfg, Mode::kTrain, &c));
  EXPECT_NE(ha, encode<double>(e, p, cfg, Mode::kEval, nullptr));
}

TEST(Encode, CausalPrefixOracle) {
  const ModelConfig cfg = small_config();
  const auto p = init_params<double>(cfg, 3);
  const Sequence full{3, 9, 1, 14, 2, 2, 7, 11};
  for (std::size_t k = 1; k <= full.size(); ++k) {
    const Sequence prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(k));
    const RowVectorX<double> direct =
        encode<double>(embed_sequence<double>(prefix, p), p, cfg, Mode::kEval, nullptr);
    // Encode the full sequence but read out at position k - 1: pack the full
    // sequence and compare the hidden state the truncated encoder produces.
    SequenceBatch batch;
    batch.add(full);
    batch.add(prefix);
    std::vector<RngStream> none;
    const MatrixX<double> both = encode_batch<double>(batch, p, cfg, Mode::kEval, none, nullptr);
    EXPECT_TRUE(both.row(1).isApprox(direct, 1e-14));
    if (k < full.size()) {
      // A longer continuation never changes the prefix readout.
      Sequence extended = prefix;
      extended.push_back(static_cast<ItemIndex>(k));
      SequenceBatch b2;
      b2.add(prefix);
      b2.add(extended);
      const MatrixX<double> r = encode_batch<double>(b2, p, cfg, Mode::kEval, none, nullptr);
      EXPECT_TRUE(r.row(0).isApprox(direct, 1e-14));
    }
  }
}

TEST(Encode, ReadoutIgnoresFutureItems) {
  // Gradient of the readout at position k - 1 with respect to any later
  // embedded row is exactly zero.
  const ModelConfig cfg = small_config();
  const auto p = init_params<double>(cfg, 4);
  const Sequence seq{1, 2, 3, 4, 5, 6};
  const MatrixX<double> e = embed_sequence<double>(seq, p);
  for (Eigen::Index k = 1; k < 6; ++k) {
    const MatrixX<double> prefix = e.topRows(k);
    const std::vector<std::size_t> offsets{0, static_cast<std::size_t>(k)};
    ForwardRecord<double> rec;
    encode_embedded<double>(prefix, offsets, p, cfg, Mode::kEval, {}, &rec);
    auto grads = ModelParams<double>::zeros_like(p);
    const MatrixX<double> d_in =
        backward_embedded<double>(p, cfg, rec, MatrixX<double>::Ones(1, cfg.embed_dim), grads);
    EXPECT_EQ(d_in.rows(), k);
    // Mutating row k of the full matrix cannot change the prefix encoding.
    MatrixX<double> mutated = e;
    mutated.row(k).setConstant(100.0);
    EXPECT_EQ(encode<double>(mutated.topRows(k), p, cfg, Mode::kEval, nullptr),
              encode<double>(prefix, p, cfg, Mode::kEval, nullptr));
  }
}

TEST(ScoreItems, ValidDistribution) {
  const auto p = init_params<double>(small_config(), 5);
  const RowVectorX<double> zero = RowVectorX<double>::Zero(8);
  const RowVectorX<double> uniform = score_items<double>(zero, p);
  for (Eigen::Index i = 0; i < uniform.size(); ++i) EXPECT_NEAR(uniform(i), 1.0 / 20, 1e-15);

  RngStream rng(1);
  for (int t = 0; t < 50; ++t) {
    RowVectorX<double> h(8);
    for (Eigen::Index i = 0; i < 8; ++i) h(i) = 10 * rng.normal();
    const RowVectorX<double> s = score_items<double>(h, p);
    EXPECT_NEAR(s.sum(), 1.0, 1e-12);
    EXPECT_GT(s.minCoeff(), 0.0);
  }
  RowVectorX<double> logits(4);
  logits << 1.0, -2.0, 0.5, 3.0;
  const RowVectorX<double> shifted = (logits.array() + 700.0).matrix();
  EXPECT_TRUE(softmax<double>(logits).isApprox(softmax<double>(shifted), 1e-12));
}

class GradientCheck : public ::testing::TestWithParam<EncoderKind> {};

TEST_P(GradientCheck, FullObjectiveMatchesFiniteDifferences) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto problem = testing::random_problem(GetParam(), seed);
    const auto params = init_params<double>(problem.model, seed + 10);
    const auto report = testing::check_gradients(problem, params);
    EXPECT_LT(report.max_rel_error, 1e-4) << report.worst_entry;
    EXPECT_EQ(report.entries, params.num_parameters());
  }
}

TEST_P(GradientCheck, WithDropoutMasksHeldFixed) {
  auto problem = testing::random_problem(GetParam(), 7);
  problem.model.dropout_rate = 0.3;
  problem.mode = Mode::kTrain;
  problem.dropout_seed = 5;
  const auto params = init_params<double>(problem.model, 8);
  const auto report = testing::check_gradients(problem, params);
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst_entry;
}

INSTANTIATE_TEST_SUITE_P(Encoders, GradientCheck,
                         ::testing::Values(EncoderKind::kSelfAttention, EncoderKind::kMeanPool),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Backward, UnusedPositionsGetExactlyZero) {
  auto problem = testing::random_problem(EncoderKind::kSelfAttention, 3);
  for (auto* group : {&problem.original, &problem.view1, &problem.view2})
    for (auto& s : *group) s.resize(std::min<std::size_t>(s.size(), 5));
  const auto params = init_params<double>(problem.model, 3);
  ModelParams<double> grads;
  testing::objective_and_grad(problem, params, &grads);
  EXPECT_TRUE((grads.positional_embeddings.bottomRows(3).array() == 0.0).all());
  EXPECT_FALSE((grads.positional_embeddings.topRows(1).array() == 0.0).all());
}

TEST(Backward, ConstantLossHasZeroGradient) {
  auto problem = testing::random_problem(EncoderKind::kSelfAttention, 4);
  problem.weights.assign(4, 0.0);
  const auto params = init_params<double>(problem.model, 4);
  ModelParams<double> grads;
  EXPECT_EQ(testing::objective_and_grad(problem, params, &grads), 0.0);
  for_each_tensor(grads, [](const std::string& name, const auto& t) {
    EXPECT_TRUE((t.array() == 0.0).all()) << name;
  });
}

TEST(CheckFinite, NamesTheTensor) {
  auto p = init_params<double>(small_config(), 1);
  p.blocks[1].w1(0, 0) = std::nan("");
  try {
    check_finite(p, "gradient");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
    EXPECT_NE(std::string(e.what()).find("block1.w1"), std::string::npos);
  }
}

TEST(ModelParams, CastRoundTrip) {
  const auto p = init_params<double>(small_config(), 1);
  const auto f = p.cast<float>();
  EXPECT_TRUE(f.cast<double>().item_embeddings.isApprox(p.item_embeddings, 1e-6));
  EXPECT_EQ(f.num_parameters(), p.num_parameters());
}

}  // namespace
}  // namespace facl
