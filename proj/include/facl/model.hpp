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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facl/rng.hpp"
#include "facl/types.hpp"

namespace facl {

enum class EncoderKind { kSelfAttention, kMeanPool };
enum class Mode { kTrain, kEval };

std::string_view to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view text);

struct ModelConfig {
  std::size_t num_items = 0;
  int embed_dim = 64;
  int num_layers = 2;
  int num_heads = 2;
  std::size_t max_len = 50;
  double dropout_rate = 0.2;
  EncoderKind encoder_kind = EncoderKind::kSelfAttention;

  void validate() const;
};

// Pre-norm transformer block: x += Attn(LN1(x)); x += FFN(LN2(x)).
template <typename Scalar>
struct AttentionBlock {
  RowVectorX<Scalar> ln1_gain, ln1_bias;
  MatrixX<Scalar> wq, wk, wv, wo;
  RowVectorX<Scalar> bq, bk, bv, bo;
  RowVectorX<Scalar> ln2_gain, ln2_bias;
  MatrixX<Scalar> w1;  // d x 4d
  RowVectorX<Scalar> b1;
  MatrixX<Scalar> w2;  // 4d x d
  RowVectorX<Scalar> b2;
};

// All trainable tensors. The item embedding matrix is shared between the
// input layer and output scoring. Tensors of the unused encoder kind are
// empty. A gradient set is a ModelParams of the same shape.
template <typename Scalar>
struct ModelParams {
  MatrixX<Scalar> item_embeddings;        // |V| x d
  MatrixX<Scalar> positional_embeddings;  // max_len x d
  std::vector<AttentionBlock<Scalar>> blocks;
  RowVectorX<Scalar> final_gain, final_bias;
  MatrixX<Scalar> pool_weight;  // mean-pool encoder only
  RowVectorX<Scalar> pool_bias;

  static ModelParams zeros_like(const ModelParams& other);
  void set_zero();
  std::size_t num_parameters() const;

  template <typename Other>
  ModelParams<Other> cast() const;
};

template <typename P, typename F>
void for_each_tensor(P& params, F&& f) {
  f("item_embeddings", params.item_embeddings);
  f("positional_embeddings", params.positional_embeddings);
  for (std::size_t l = 0; l < params.blocks.size(); ++l) {
    auto& b = params.blocks[l];
    const std::string p = "block" + std::to_string(l) + ".";
    f(p + "ln1_gain", b.ln1_gain);
    f(p + "ln1_bias", b.ln1_bias);
    f(p + "wq", b.wq);
    f(p + "wk", b.wk);
    f(p + "wv", b.wv);
    f(p + "wo", b.wo);
    f(p + "bq", b.bq);
    f(p + "bk", b.bk);
    f(p + "bv", b.bv);
    f(p + "bo", b.bo);
    f(p + "ln2_gain", b.ln2_gain);
    f(p + "ln2_bias", b.ln2_bias);
    f(p + "w1", b.w1);
    f(p + "b1", b.b1);
    f(p + "w2", b.w2);
    f(p + "b2", b.b2);
  }
  f("final_gain", params.final_gain);
  f("final_bias", params.final_bias);
  f("pool_weight", params.pool_weight);
  f("pool_bias", params.pool_bias);
}

// Visits matching tensors of two parameter sets, e.g. params and gradients.
template <typename P, typename Q, typename F>
void for_each_tensor_pair(P& a, Q& b, F&& f) {
  f("item_embeddings", a.item_embeddings, b.item_embeddings);
  f("positional_embeddings", a.positional_embeddings, b.positional_embeddings);
  for (std::size_t l = 0; l < a.blocks.size(); ++l) {
    auto& x = a.blocks[l];
    auto& y = b.blocks[l];
    const std::string p = "block" + std::to_string(l) + ".";
    f(p + "ln1_gain", x.ln1_gain, y.ln1_gain);
    f(p + "ln1_bias", x.ln1_bias, y.ln1_bias);
    f(p + "wq", x.wq, y.wq);
    f(p + "wk", x.wk, y.wk);
    f(p + "wv", x.wv, y.wv);
    f(p + "wo", x.wo, y.wo);
    f(p + "bq", x.bq, y.bq);
    f(p + "bk", x.bk, y.bk);
    f(p + "bv", x.bv, y.bv);
    f(p + "bo", x.bo, y.bo);
    f(p + "ln2_gain", x.ln2_gain, y.ln2_gain);
    f(p + "ln2_bias", x.ln2_bias, y.ln2_bias);
    f(p + "w1", x.w1, y.w1);
    f(p + "b1", x.b1, y.b1);
    f(p + "w2", x.w2, y.w2);
    f(p + "b2", x.b2, y.b2);
  }
  f("final_gain", a.final_gain, b.final_gain);
  f("final_bias", a.final_bias, b.final_bias);
  f("pool_weight", a.pool_weight, b.pool_weight);
  f("pool_bias", a.pool_bias, b.pool_bias);
}

// Ragged batch of sequences packed row-wise.
struct SequenceBatch {
  std::vector<ItemIndex> items;
  std::vector<std::size_t> offsets{0};

  void add(std::span<const ItemIndex> seq);
  std::size_t size() const { return offsets.size() - 1; }
  std::size_t rows() const { return items.size(); }
  std::size_t begin(std::size_t b) const { return offsets[b]; }
  std::size_t length(std::size_t b) const { return offsets[b + 1] - offsets[b]; }
};

template <typename Scalar>
struct LayerNormCache {
  MatrixX<Scalar> xhat;
  VectorX<Scalar> inv_std;
};

template <typename Scalar>
struct BlockCache {
  LayerNormCache<Scalar> ln1;
  MatrixX<Scalar> a, q, k, v;
  std::vector<MatrixX<Scalar>> probs;  // index b * heads + h
  MatrixX<Scalar> context;
  MatrixX<Scalar> attn_mask;
  LayerNormCache<Scalar> ln2;
  MatrixX<Scalar> b, pre_act, act;
  MatrixX<Scalar> ffn_mask;
};

// Everything backward needs from a forward pass.
template <typename Scalar>
struct ForwardRecord {
  std::vector<ItemIndex> items;  // empty when encoding a raw embedding
  std::vector<std::size_t> offsets;
  MatrixX<Scalar> embed_mask;
  std::vector<BlockCache<Scalar>> blocks;
  LayerNormCache<Scalar> final_ln;
  MatrixX<Scalar> pooled;
};

template <typename Scalar>
ModelParams<Scalar> init_params(const ModelConfig& cfg, std::uint64_t seed);

// Row i = item embedding of seq[i] + positional embedding i. Throws
// Error(kOutOfVocabulary) for unknown items and kInvalidArgument when the
// sequence exceeds max_len.
template <typename Scalar>
MatrixX<Scalar> embed_sequence(std::span<const ItemIndex> seq,
                               const ModelParams<Scalar>& params);
template <typename Scalar>
MatrixX<Scalar> embed_batch(const SequenceBatch& batch,
                            const ModelParams<Scalar>& params);

// Encodes packed embeddings (one block of rows per sequence) into one
// representation per sequence. `dropout` holds one stream per sequence and
// is consulted only in train mode with a positive rate.
template <typename Scalar>
MatrixX<Scalar> encode_embedded(const MatrixX<Scalar>& embedded,
                                std::span<const std::size_t> offsets,
                                const ModelParams<Scalar>& params,
                                const ModelConfig& cfg, Mode mode,
                                std::span<RngStream> dropout,
                                ForwardRecord<Scalar>* record);

// Single-sequence convenience wrapper; returns h (1 x d).
template <typename Scalar>
RowVectorX<Scalar> encode(const MatrixX<Scalar>& embedded,
                          const ModelParams<Scalar>& params,
                          const ModelConfig& cfg, Mode mode, RngStream* rng);

// embed_batch + encode_embedded; the record also keeps the item indices.
template <typename Scalar>
MatrixX<Scalar> encode_batch(const SequenceBatch& batch,
                             const ModelParams<Scalar>& params,
                             const ModelConfig& cfg, Mode mode,
                             std::span<RngStream> dropout,
                             ForwardRecord<Scalar>* record);

// Reverse pass for encode_embedded: accumulates into `grads` and returns
// the gradient with respect to the embedded input.
template <typename Scalar>
MatrixX<Scalar> backward_embedded(const ModelParams<Scalar>& params,
                                  const ModelConfig& cfg,
                                  const ForwardRecord<Scalar>& record,
                                  const MatrixX<Scalar>& d_repr,
                                  ModelParams<Scalar>& grads);

// Reverse pass for encode_batch, scattering into the embedding tables.
template <typename Scalar>
void backward_batch(const ModelParams<Scalar>& params, const ModelConfig& cfg,
                    const ForwardRecord<Scalar>& record,
                    const MatrixX<Scalar>& d_repr, ModelParams<Scalar>& grads);

// Throws Error(kNumerical) naming the first tensor with a non-finite entry.
template <typename Scalar>
void check_finite(const ModelParams<Scalar>& tensors, std::string_view what);

// Logits h M^T for each row of `repr`.
template <typename Scalar>
MatrixX<Scalar> item_logits(const MatrixX<Scalar>& repr,
                            const ModelParams<Scalar>& params);

// softmax(h M^T).
template <typename Scalar>
RowVectorX<Scalar> score_items(const RowVectorX<Scalar>& h,
                               const ModelParams<Scalar>& params);

// Numerically stable softmax of one row.
template <typename Scalar>
RowVectorX<Scalar> softmax(const RowVectorX<Scalar>& logits);

}  // namespace facl
