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

#include "facl/model.hpp"

#include <cmath>
#include <limits>

namespace facl {

std::string_view to_string(EncoderKind kind) {
  return kind == EncoderKind::kSelfAttention ? "self_attention" : "mean_pool";
}

EncoderKind parse_encoder_kind(std::string_view text) {
  if (text == "self_attention") return EncoderKind::kSelfAttention;
  if (text == "mean_pool") return EncoderKind::kMeanPool;
  throw Error(ErrorCode::kConfig, "unknown encoder kind '" + std::string(text) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, "model: " + m); };
  if (embed_dim < 1) fail("embed_dim must be positive");
  if (num_heads < 1 || embed_dim % num_heads != 0)
    fail("embed_dim must be divisible by num_heads");
  if (num_layers < 0) fail("num_layers must be >= 0");
  if (max_len < 2) fail("max_len must be >= 2");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must lie in [0, 1)");
  if (num_items < 1) fail("num_items must be positive");
}

void SequenceBatch::add(std::span<const ItemIndex> seq) {
  items.insert(items.end(), seq.begin(), seq.end());
  offsets.push_back(items.size());
}

template <typename Scalar>
ModelParams<Scalar> ModelParams<Scalar>::zeros_like(const ModelParams& other) {
  ModelParams out = other;
  out.set_zero();
  return out;
}

template <typename Scalar>
void ModelParams<Scalar>::set_zero() {
  for_each_tensor(*this, [](const std::string&, auto& t) { t.setZero(); });
}

template <typename Scalar>
std::size_t ModelParams<Scalar>::num_parameters() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&](const std::string&, const auto& t) {
    n += static_cast<std::size_t>(t.size());
  });
  return n;
}

template <typename Scalar>
template <typename Other>
ModelParams<Other> ModelParams<Scalar>::cast() const {
  ModelParams<Other> out;
  out.blocks.resize(blocks.size());
  for_each_tensor_pair(*this, out, [](const std::string&, const auto& a, auto& b) {
    b = a.template cast<Other>();
  });
  return out;
}

namespace {

using Eigen::Index;

constexpr double kLayerNormEps = 1e-6;

template <typename Scalar>
void fill_normal(MatrixX<Scalar>& t, Index rows, Index cols, double scale,
                 RngStream& rng) {
  t.resize(rows, cols);
  for (Index i = 0; i < t.size(); ++i)
    t.data()[i] = static_cast<Scalar>(scale * rng.normal());
}

template <typename Scalar>
void layer_norm_forward(const MatrixX<Scalar>& x, const RowVectorX<Scalar>& gain,
                        const RowVectorX<Scalar>& bias, MatrixX<Scalar>& y,
                        LayerNormCache<Scalar>& cache) {
  const VectorX<Scalar> mean = x.rowwise().mean();
  MatrixX<Scalar> centered = x.colwise() - mean;
  const VectorX<Scalar> var = centered.array().square().rowwise().mean();
  cache.inv_std = (var.array() + static_cast<Scalar>(kLayerNormEps)).rsqrt();
  cache.xhat = centered.array().colwise() * cache.inv_std.array();
  y = (cache.xhat.array().rowwise() * gain.array()).rowwise() + bias.array();
}

template <typename Scalar>
MatrixX<Scalar> layer_norm_backward(const MatrixX<Scalar>& dy,
                                    const RowVectorX<Scalar>& gain,
                                    const LayerNormCache<Scalar>& cache,
                                    RowVectorX<Scalar>& d_gain,
                                    RowVectorX<Scalar>& d_bias) {
  d_gain += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  d_bias += dy.colwise().sum();
  const MatrixX<Scalar> dxhat = dy.array().rowwise() * gain.array();
  const VectorX<Scalar> mean_d = dxhat.rowwise().mean();
  const VectorX<Scalar> mean_dx =
      (dxhat.array() * cache.xhat.array()).rowwise().mean();
  MatrixX<Scalar> dx = dxhat.colwise() - mean_d;
  dx -= (cache.xhat.array().colwise() * mean_dx.array()).matrix();
  return dx.array().colwise() * cache.inv_std.array();
}

// GELU in its tanh form, x * sigmoid(2u) with u = k (x + 0.044715 x^3),
// written with exp so Eigen vectorises it.
constexpr double kGeluK = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluC = 0.044715;

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> gelu_gate(const MatrixX<Scalar>& x) {
  const auto a = x.array();
  const Scalar k2 = static_cast<Scalar>(-2.0 * kGeluK);
  return (Scalar(1) + (k2 * (a + static_cast<Scalar>(kGeluC) * a.cube())).exp()).inverse();
}

template <typename Scalar>
MatrixX<Scalar> gelu(const MatrixX<Scalar>& x) {
  return (x.array() * gelu_gate(x)).matrix();
}

template <typename Scalar>
MatrixX<Scalar> gelu_grad(const MatrixX<Scalar>& x) {
  const auto s = gelu_gate(x);
  const auto a = x.array();
  const Scalar k2 = static_cast<Scalar>(2.0 * kGeluK);
  const Scalar c3 = static_cast<Scalar>(3.0 * kGeluC);
  return (s + a * s * (Scalar(1) - s) * k2 * (Scalar(1) + c3 * a.square())).matrix();
}

// Inverted-dropout mask, one stream per sequence block of rows.
template <typename Scalar>
MatrixX<Scalar> draw_mask(std::span<const std::size_t> offsets, Index cols,
                          double rate, std::span<RngStream> streams) {
  const std::size_t batch = offsets.size() - 1;
  MatrixX<Scalar> mask(static_cast<Index>(offsets.back()), cols);
  const Scalar keep = static_cast<Scalar>(1.0 / (1.0 - rate));
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t r = offsets[b]; r < offsets[b + 1]; ++r)
      for (Index c = 0; c < cols; ++c)
        mask(static_cast<Index>(r), c) =
            streams[b].uniform() > rate ? keep : Scalar(0);
  return mask;
}

bool dropout_active(const ModelConfig& cfg, Mode mode) {
  return mode == Mode::kTrain && cfg.dropout_rate > 0.0;
}

}  // namespace

template <typename Scalar>
ModelParams<Scalar> init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RngStream rng(seed, 0, 0, StreamTag::kInit);
  const Index d = cfg.embed_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  ModelParams<Scalar> p;
  fill_normal(p.item_embeddings, static_cast<Index>(cfg.num_items), d, scale, rng);
  fill_normal(p.positional_embeddings, static_cast<Index>(cfg.max_len), d, scale, rng);
  auto ones = [&] { return RowVectorX<Scalar>::Ones(d); };
  auto zeros = [](Index n) { return RowVectorX<Scalar>::Zero(n); };
  if (cfg.encoder_kind == EncoderKind::kSelfAttention) {
    p.blocks.resize(static_cast<std::size_t>(cfg.num_layers));
    for (auto& b : p.blocks) {
      b.ln1_gain = ones();
      b.ln1_bias = zeros(d);
      fill_normal(b.wq, d, d, scale, rng);
      fill_normal(b.wk, d, d, scale, rng);
      fill_normal(b.wv, d, d, scale, rng);
      fill_normal(b.wo, d, d, scale, rng);
      b.bq = zeros(d);
      b.bk = zeros(d);
      b.bv = zeros(d);
      b.bo = zeros(d);
      b.ln2_gain = ones();
      b.ln2_bias = zeros(d);
      fill_normal(b.w1, d, 4 * d, scale, rng);
      b.b1 = zeros(4 * d);
      fill_normal(b.w2, 4 * d, d, scale, rng);
      b.b2 = zeros(d);
    }
    p.final_gain = ones();
    p.final_bias = zeros(d);
  } else {
    fill_normal(p.pool_weight, d, d, scale, rng);
    p.pool_bias = zeros(d);
  }
  return p;
}

template <typename Scalar>
MatrixX<Scalar> embed_batch(const SequenceBatch& batch,
                            const ModelParams<Scalar>& params) {
  const Index d = params.item_embeddings.cols();
  const auto num_items = static_cast<std::size_t>(params.item_embeddings.rows());
  const auto max_len = static_cast<std::size_t>(params.positional_embeddings.rows());
  MatrixX<Scalar> e(static_cast<Index>(batch.rows()), d);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const std::size_t len = batch.length(b);
    if (len == 0) throw Error(ErrorCode::kInvalidArgument, "empty sequence in batch");
    if (len > max_len)
      throw Error(ErrorCode::kInvalidArgument,
                  "sequence length " + std::to_string(len) + " exceeds max_len " +
                      std::to_string(max_len));
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t r = batch.begin(b) + i;
      const ItemIndex v = batch.items[r];
      if (v < 0 || static_cast<std::size_t>(v) >= num_items)
        throw Error(ErrorCode::kOutOfVocabulary,
                    "item index " + std::to_string(v) + " outside catalog of " +
                        std::to_string(num_items));
      e.row(static_cast<Index>(r)) =
          params.item_embeddings.row(v) +
          params.positional_embeddings.row(static_cast<Index>(i));
    }
  }
  return e;
}

template <typename Scalar>
MatrixX<Scalar> embed_sequence(std::span<const ItemIndex> seq,
                               const ModelParams<Scalar>& params) {
  SequenceBatch batch;
  batch.add(seq);
  return embed_batch(batch, params);
}

template <typename Scalar>
MatrixX<Scalar> encode_embedded(const MatrixX<Scalar>& embedded,
                                std::span<const std::size_t> offsets,
                                const ModelParams<Scalar>& params,
                                const ModelConfig& cfg, Mode mode,
                                std::span<RngStream> dropout,
                                ForwardRecord<Scalar>* record) {
  const std::size_t batch = offsets.size() - 1;
  const Index d = embedded.cols();
  const bool use_dropout = dropout_active(cfg, mode);
  if (use_dropout && dropout.size() != batch)
    throw Error(ErrorCode::kInvalidArgument, "one dropout stream per sequence required");

  ForwardRecord<Scalar> local;
  ForwardRecord<Scalar>& rec = record ? *record : local;
  rec.offsets.assign(offsets.begin(), offsets.end());

  MatrixX<Scalar> x = embedded;
  rec.embed_mask.resize(0, 0);
  if (use_dropout) {
    rec.embed_mask = draw_mask<Scalar>(offsets, d, cfg.dropout_rate, dropout);
    x.array() *= rec.embed_mask.array();
  }

  MatrixX<Scalar> out(static_cast<Index>(batch), d);

  if (cfg.encoder_kind == EncoderKind::kMeanPool) {
    rec.pooled.resize(static_cast<Index>(batch), d);
    for (std::size_t b = 0; b < batch; ++b) {
      const auto len = static_cast<Index>(offsets[b + 1] - offsets[b]);
      rec.pooled.row(static_cast<Index>(b)) =
          x.middleRows(static_cast<Index>(offsets[b]), len).colwise().mean();
    }
    out.noalias() = rec.pooled * params.pool_weight;
    out.rowwise() += params.pool_bias;
    return out;
  }

  const int heads = cfg.num_heads;
  const Index dh = d / heads;
  const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(dh)));
  rec.blocks.assign(params.blocks.size(), {});

  MatrixX<Scalar> tmp;
  for (std::size_t l = 0; l < params.blocks.size(); ++l) {
    const auto& w = params.blocks[l];
    auto& c = rec.blocks[l];

    layer_norm_forward(x, w.ln1_gain, w.ln1_bias, c.a, c.ln1);
    c.q.noalias() = c.a * w.wq;
    c.q.rowwise() += w.bq;
    c.k.noalias() = c.a * w.wk;
    c.k.rowwise() += w.bk;
    c.v.noalias() = c.a * w.wv;
    c.v.rowwise() += w.bv;

    c.context.resize(x.rows(), d);
    c.probs.resize(batch * static_cast<std::size_t>(heads));
    for (std::size_t b = 0; b < batch; ++b) {
      const auto o = static_cast<Index>(offsets[b]);
      const auto len = static_cast<Index>(offsets[b + 1] - offsets[b]);
      for (int h = 0; h < heads; ++h) {
        const Index col = h * dh;
        MatrixX<Scalar> s = c.q.block(o, col, len, dh) *
                            c.k.block(o, col, len, dh).transpose();
        s *= scale;
        for (Index i = 0; i < len; ++i) {
          const Scalar mx = s.row(i).head(i + 1).maxCoeff();
          Scalar sum = 0;
          for (Index j = 0; j <= i; ++j) {
            s(i, j) = std::exp(s(i, j) - mx);
            sum += s(i, j);
          }
          for (Index j = 0; j <= i; ++j) s(i, j) /= sum;
          for (Index j = i + 1; j < len; ++j) s(i, j) = 0;
        }
        c.context.block(o, col, len, dh).noalias() = s * c.v.block(o, col, len, dh);
        c.probs[b * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)] =
            std::move(s);
      }
    }
    tmp.noalias() = c.context * w.wo;
    tmp.rowwise() += w.bo;
    c.attn_mask.resize(0, 0);
    if (use_dropout) {
      c.attn_mask = draw_mask<Scalar>(offsets, d, cfg.dropout_rate, dropout);
      tmp.array() *= c.attn_mask.array();
    }
    x += tmp;

    layer_norm_forward(x, w.ln2_gain, w.ln2_bias, c.b, c.ln2);
    c.pre_act.noalias() = c.b * w.w1;
    c.pre_act.rowwise() += w.b1;
    c.act = gelu(c.pre_act);
    tmp.noalias() = c.act * w.w2;
    tmp.rowwise() += w.b2;
    c.ffn_mask.resize(0, 0);
    if (use_dropout) {
      c.ffn_mask = draw_mask<Scalar>(offsets, d, cfg.dropout_rate, dropout);
      tmp.array() *= c.ffn_mask.array();
    }
    x += tmp;
  }

  MatrixX<Scalar> last(static_cast<Index>(batch), d);
  for (std::size_t b = 0; b < batch; ++b)
    last.row(static_cast<Index>(b)) = x.row(static_cast<Index>(offsets[b + 1] - 1));
  layer_norm_forward(last, params.final_gain, params.final_bias, out, rec.final_ln);
  return out;
}

template <typename Scalar>
RowVectorX<Scalar> encode(const MatrixX<Scalar>& embedded,
                          const ModelParams<Scalar>& params,
                          const ModelConfig& cfg, Mode mode, RngStream* rng) {
  if (embedded.rows() == 0)
    throw Error(ErrorCode::kInvalidArgument, "cannot encode an empty sequence");
  const std::size_t offsets[2] = {0, static_cast<std::size_t>(embedded.rows())};
  std::span<RngStream> streams;
  if (rng) streams = std::span<RngStream>(rng, 1);
  MatrixX<Scalar> h = encode_embedded(embedded, std::span<const std::size_t>(offsets),
                                      params, cfg, mode, streams,
                                      static_cast<ForwardRecord<Scalar>*>(nullptr));
  return h.row(0);
}

template <typename Scalar>
MatrixX<Scalar> encode_batch(const SequenceBatch& batch,
                             const ModelParams<Scalar>& params,
                             const ModelConfig& cfg, Mode mode,
                             std::span<RngStream> dropout,
                             ForwardRecord<Scalar>* record) {
  const MatrixX<Scalar> e = embed_batch(batch, params);
  MatrixX<Scalar> h = encode_embedded<Scalar>(e, batch.offsets, params, cfg, mode, dropout, record);
  if (record) record->items = batch.items;
  return h;
}

template <typename Scalar>
MatrixX<Scalar> backward_embedded(const ModelParams<Scalar>& params,
                                  const ModelConfig& cfg,
                                  const ForwardRecord<Scalar>& rec,
                                  const MatrixX<Scalar>& d_repr,
                                  ModelParams<Scalar>& grads) {
  const auto& offsets = rec.offsets;
  const std::size_t batch = offsets.size() - 1;
  const Index d = d_repr.cols();
  const auto rows = static_cast<Index>(offsets.back());
  MatrixX<Scalar> dx = MatrixX<Scalar>::Zero(rows, d);

  if (cfg.encoder_kind == EncoderKind::kMeanPool) {
    grads.pool_weight.noalias() += rec.pooled.transpose() * d_repr;
    grads.pool_bias += d_repr.colwise().sum();
    const MatrixX<Scalar> d_pooled = d_repr * params.pool_weight.transpose();
    for (std::size_t b = 0; b < batch; ++b) {
      const auto len = static_cast<Index>(offsets[b + 1] - offsets[b]);
      dx.middleRows(static_cast<Index>(offsets[b]), len).rowwise() +=
          d_pooled.row(static_cast<Index>(b)) / static_cast<Scalar>(len);
    }
  } else {
    const MatrixX<Scalar> d_last = layer_norm_backward(
        d_repr, params.final_gain, rec.final_ln, grads.final_gain, grads.final_bias);
    for (std::size_t b = 0; b < batch; ++b)
      dx.row(static_cast<Index>(offsets[b + 1] - 1)) = d_last.row(static_cast<Index>(b));

    const int heads = cfg.num_heads;
    const Index dh = d / heads;
    const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(dh)));
    MatrixX<Scalar> dtmp, dq, dk, dv, dctx;
    for (std::size_t li = params.blocks.size(); li-- > 0;) {
      const auto& w = params.blocks[li];
      auto& g = grads.blocks[li];
      const auto& c = rec.blocks[li];

      // Feed-forward branch.
      dtmp = dx;
      if (c.ffn_mask.size()) dtmp.array() *= c.ffn_mask.array();
      g.w2.noalias() += c.act.transpose() * dtmp;
      g.b2 += dtmp.colwise().sum();
      MatrixX<Scalar> d_pre = dtmp * w.w2.transpose();
      d_pre.array() *= gelu_grad(c.pre_act).array();
      g.w1.noalias() += c.b.transpose() * d_pre;
      g.b1 += d_pre.colwise().sum();
      const MatrixX<Scalar> d_b = d_pre * w.w1.transpose();
      dx += layer_norm_backward(d_b, w.ln2_gain, c.ln2, g.ln2_gain, g.ln2_bias);

      // Attention branch.
      dtmp = dx;
      if (c.attn_mask.size()) dtmp.array() *= c.attn_mask.array();
      g.wo.noalias() += c.context.transpose() * dtmp;
      g.bo += dtmp.colwise().sum();
      dctx.noalias() = dtmp * w.wo.transpose();

      dq.resize(rows, d);
      dk.resize(rows, d);
      dv.resize(rows, d);
      for (std::size_t b = 0; b < batch; ++b) {
        const auto o = static_cast<Index>(offsets[b]);
        const auto len = static_cast<Index>(offsets[b + 1] - offsets[b]);
        for (int h = 0; h < heads; ++h) {
          const Index col = h * dh;
          const auto& p = c.probs[b * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
          const auto dc = dctx.block(o, col, len, dh);
          MatrixX<Scalar> dp = dc * c.v.block(o, col, len, dh).transpose();
          dv.block(o, col, len, dh).noalias() = p.transpose() * dc;
          const VectorX<Scalar> row_dot = (dp.array() * p.array()).rowwise().sum();
          MatrixX<Scalar> ds = p.array() * (dp.colwise() - row_dot).array();
          ds *= scale;
          dq.block(o, col, len, dh).noalias() = ds * c.k.block(o, col, len, dh);
          dk.block(o, col, len, dh).noalias() = ds.transpose() * c.q.block(o, col, len, dh);
        }
      }
      g.wq.noalias() += c.a.transpose() * dq;
      g.wk.noalias() += c.a.transpose() * dk;
      g.wv.noalias() += c.a.transpose() * dv;
      g.bq += dq.colwise().sum();
      g.bk += dk.colwise().sum();
      g.bv += dv.colwise().sum();
      MatrixX<Scalar> d_a = dq * w.wq.transpose();
      d_a.noalias() += dk * w.wk.transpose();
      d_a.noalias() += dv * w.wv.transpose();
      dx += layer_norm_backward(d_a, w.ln1_gain, c.ln1, g.ln1_gain, g.ln1_bias);
    }
  }

  if (rec.embed_mask.size()) dx.array() *= rec.embed_mask.array();
  return dx;
}

template <typename Scalar>
void backward_batch(const ModelParams<Scalar>& params, const ModelConfig& cfg,
                    const ForwardRecord<Scalar>& rec,
                    const MatrixX<Scalar>& d_repr, ModelParams<Scalar>& grads) {
  const MatrixX<Scalar> de = backward_embedded(params, cfg, rec, d_repr, grads);
  const auto& offsets = rec.offsets;
  for (std::size_t b = 0; b + 1 < offsets.size(); ++b) {
    for (std::size_t r = offsets[b]; r < offsets[b + 1]; ++r) {
      const auto row = static_cast<Index>(r);
      grads.item_embeddings.row(rec.items[r]) += de.row(row);
      grads.positional_embeddings.row(static_cast<Index>(r - offsets[b])) += de.row(row);
    }
  }
}

template <typename Scalar>
void check_finite(const ModelParams<Scalar>& tensors, std::string_view what) {
  for_each_tensor(tensors, [&](const std::string& name, const auto& t) {
    if (!t.allFinite())
      throw Error(ErrorCode::kNumerical,
                  "non-finite " + std::string(what) + " in tensor " + name);
  });
}

template <typename Scalar>
MatrixX<Scalar> item_logits(const MatrixX<Scalar>& repr,
                            const ModelParams<Scalar>& params) {
  return repr * params.item_embeddings.transpose();
}

template <typename Scalar>
RowVectorX<Scalar> softmax(const RowVectorX<Scalar>& logits) {
  const Scalar mx = logits.maxCoeff();
  RowVectorX<Scalar> e = (logits.array() - mx).exp();
  return e / e.sum();
}

template <typename Scalar>
RowVectorX<Scalar> score_items(const RowVectorX<Scalar>& h,
                               const ModelParams<Scalar>& params) {
  const RowVectorX<Scalar> logits = h * params.item_embeddings.transpose();
  return softmax<Scalar>(logits);
}

#define FACL_INSTANTIATE_MODEL(S)                                              \
  template struct ModelParams<S>;                                              \
  template ModelParams<float> ModelParams<S>::cast<float>() const;             \
  template ModelParams<double> ModelParams<S>::cast<double>() const;           \
  template ModelParams<S> init_params<S>(const ModelConfig&, std::uint64_t);   \
  template MatrixX<S> embed_sequence<S>(std::span<const ItemIndex>,            \
                                        const ModelParams<S>&);                \
  template MatrixX<S> embed_batch<S>(const SequenceBatch&,                     \
                                     const ModelParams<S>&);                   \
  template MatrixX<S> encode_embedded<S>(                                      \
      const MatrixX<S>&, std::span<const std::size_t>, const ModelParams<S>&,  \
      const ModelConfig&, Mode, std::span<RngStream>, ForwardRecord<S>*);      \
  template RowVectorX<S> encode<S>(const MatrixX<S>&, const ModelParams<S>&,   \
                                   const ModelConfig&, Mode, RngStream*);      \
  template MatrixX<S> encode_batch<S>(const SequenceBatch&,                    \
                                      const ModelParams<S>&,                   \
                                      const ModelConfig&, Mode,                \
                                      std::span<RngStream>, ForwardRecord<S>*); \
  template MatrixX<S> backward_embedded<S>(                                    \
      const ModelParams<S>&, const ModelConfig&, const ForwardRecord<S>&,      \
      const MatrixX<S>&, ModelParams<S>&);                                     \
  template void backward_batch<S>(const ModelParams<S>&, const ModelConfig&,   \
                                  const ForwardRecord<S>&, const MatrixX<S>&,  \
                                  ModelParams<S>&);                            \
  template void check_finite<S>(const ModelParams<S>&, std::string_view);      \
  template MatrixX<S> item_logits<S>(const MatrixX<S>&, const ModelParams<S>&); \
  template RowVectorX<S> softmax<S>(const RowVectorX<S>&);                     \
  template RowVectorX<S> score_items<S>(const RowVectorX<S>&,                  \
                                        const ModelParams<S>&);

FACL_INSTANTIATE_MODEL(float)
FACL_INSTANTIATE_MODEL(double)

#undef FACL_INSTANTIATE_MODEL

}  // namespace facl
