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

#include "facl/objective.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

namespace facl {

void LossConfig::validate() const {
  if (!(cl_weight >= 0.0)) throw Error(ErrorCode::kConfig, "loss: cl_weight must be >= 0");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kConfig, "loss: temperature must be > 0");
}

namespace {

using Eigen::Index;

template <typename Scalar>
MatrixX<Scalar> normalize_rows(const MatrixX<Scalar>& x, VectorX<Scalar>& norms) {
  norms = x.rowwise().norm();
  for (Index i = 0; i < norms.size(); ++i)
    if (!(norms(i) > Scalar(0)))
      throw Error(ErrorCode::kNumerical,
                  "zero-norm representation at row " + std::to_string(i));
  return x.array().colwise() / norms.array();
}

// dL/dx for z = x / |x|.
template <typename Scalar>
MatrixX<Scalar> normalize_rows_backward(const MatrixX<Scalar>& z,
                                        const VectorX<Scalar>& norms,
                                        const MatrixX<Scalar>& dz) {
  const VectorX<Scalar> dots = (z.array() * dz.array()).rowwise().sum();
  MatrixX<Scalar> dx = dz - (z.array().colwise() * dots.array()).matrix();
  return dx.array().colwise() / norms.array();
}

// Row-wise log-sum-exp and softmax.
template <typename Scalar>
VectorX<Scalar> row_logsumexp(const MatrixX<Scalar>& s, MatrixX<Scalar>* softmax) {
  const VectorX<Scalar> mx = s.rowwise().maxCoeff();
  MatrixX<Scalar> e = (s.colwise() - mx).array().exp();
  const VectorX<Scalar> sums = e.rowwise().sum();
  if (softmax) *softmax = e.array().colwise() / sums.array();
  return mx.array() + sums.array().log();
}

}  // namespace

template <typename Scalar>
Scalar rec_loss(const RowVectorX<Scalar>& probs, ItemIndex target) {
  Scalar p = probs(target);
  if (!(p > Scalar(0))) {
    std::cerr << "warning: target probability underflowed; clamping at 1e-300\n";
    p = static_cast<Scalar>(1e-300);
    if (!(p > Scalar(0))) p = std::numeric_limits<Scalar>::denorm_min();
  }
  return -std::log(p);
}

template <typename Scalar>
MatrixX<Scalar> cosine_similarity(const MatrixX<Scalar>& a,
                                  const MatrixX<Scalar>& b) {
  VectorX<Scalar> na, nb;
  const MatrixX<Scalar> za = normalize_rows(a, na);
  const MatrixX<Scalar> zb = normalize_rows(b, nb);
  // Rounding can push parallel rows a few ulps past +-1.
  return (za * zb.transpose()).cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
}

template <typename Scalar>
VectorX<Scalar> infonce_per_anchor(const MatrixX<Scalar>& anchors,
                                   const MatrixX<Scalar>& candidates,
                                   Scalar temperature) {
  if (anchors.rows() != candidates.rows())
    throw Error(ErrorCode::kInvalidArgument, "anchor/candidate batch mismatch");
  const MatrixX<Scalar> s = cosine_similarity(anchors, candidates) / temperature;
  const VectorX<Scalar> lse = row_logsumexp<Scalar>(s, nullptr);
  return lse - s.diagonal();
}

template <typename Scalar>
Scalar infonce_loss(const MatrixX<Scalar>& anchors,
                    const MatrixX<Scalar>& candidates, Scalar temperature) {
  return infonce_per_anchor(anchors, candidates, temperature).mean();
}

template <typename Scalar>
Scalar total_loss(std::span<const Scalar> rec, std::span<const Scalar> cl,
                  std::span<const Scalar> weights, Scalar cl_weight) {
  if (rec.size() != cl.size() || rec.size() != weights.size())
    throw Error(ErrorCode::kInvalidArgument, "loss vectors differ in length");
  if (rec.empty()) return Scalar(0);
  Scalar sum = 0;
  for (std::size_t u = 0; u < rec.size(); ++u)
    sum += weights[u] * (rec[u] + cl_weight * cl[u]);
  return sum / static_cast<Scalar>(rec.size());
}

template <typename Scalar>
ObjectiveResult<Scalar> evaluate_objective(
    const MatrixX<Scalar>& repr, const MatrixX<Scalar>* view1,
    const MatrixX<Scalar>* view2, std::span<const ItemIndex> targets,
    std::span<const double> weights, const MatrixX<Scalar>& item_embeddings,
    const LossConfig& cfg) {
  const Index batch = repr.rows();
  if (static_cast<std::size_t>(batch) != targets.size() ||
      targets.size() != weights.size())
    throw Error(ErrorCode::kInvalidArgument, "objective inputs differ in batch size");
  if ((view1 == nullptr) != (view2 == nullptr))
    throw Error(ErrorCode::kInvalidArgument, "both views or neither are required");

  ObjectiveResult<Scalar> out;
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  VectorX<Scalar> w(batch);
  for (Index u = 0; u < batch; ++u) w(u) = static_cast<Scalar>(weights[static_cast<std::size_t>(u)]);

  // Recommendation term: -log softmax(h M^T)[target].
  MatrixX<Scalar> logits = repr * item_embeddings.transpose();
  MatrixX<Scalar> probs;
  const VectorX<Scalar> lse = row_logsumexp<Scalar>(logits, &probs);
  out.rec.resize(batch);
  for (Index u = 0; u < batch; ++u)
    out.rec(u) = lse(u) - logits(u, targets[static_cast<std::size_t>(u)]);

  MatrixX<Scalar> d_logits = probs;
  for (Index u = 0; u < batch; ++u) d_logits(u, targets[static_cast<std::size_t>(u)]) -= Scalar(1);
  d_logits.array().colwise() *= (w * inv_b).array();
  out.d_repr = d_logits * item_embeddings;
  out.d_item_embeddings = d_logits.transpose() * repr;

  out.cl = VectorX<Scalar>::Zero(batch);
  if (view1) {
    const Scalar t = static_cast<Scalar>(cfg.temperature);
    const Scalar tau = static_cast<Scalar>(cfg.cl_weight);
    VectorX<Scalar> n1, n2;
    const MatrixX<Scalar> z1 = normalize_rows(*view1, n1);
    const MatrixX<Scalar> z2 = normalize_rows(*view2, n2);
    const MatrixX<Scalar> s = (z1 * z2.transpose()) / t;

    MatrixX<Scalar> p12, p21;
    const VectorX<Scalar> l12 = row_logsumexp<Scalar>(s, &p12) - s.diagonal();
    const MatrixX<Scalar> st = s.transpose();
    const VectorX<Scalar> l21 = row_logsumexp<Scalar>(st, &p21) - s.diagonal();

    const Scalar half = cfg.symmetric ? Scalar(0.5) : Scalar(1);
    out.cl = cfg.symmetric ? VectorX<Scalar>(half * (l12 + l21)) : l12;

    // Upstream factor of each anchor's loss in the total objective.
    const VectorX<Scalar> up = w * (tau * inv_b * half);
    MatrixX<Scalar> ds = p12;
    ds.diagonal().array() -= Scalar(1);
    ds.array().colwise() *= up.array();
    if (cfg.symmetric) {
      MatrixX<Scalar> ds_t = p21;
      ds_t.diagonal().array() -= Scalar(1);
      ds_t.array().colwise() *= up.array();
      ds += ds_t.transpose();
    }
    ds /= t;
    const MatrixX<Scalar> dz1 = ds * z2;
    const MatrixX<Scalar> dz2 = ds.transpose() * z1;
    out.d_view1 = normalize_rows_backward(z1, n1, dz1);
    out.d_view2 = normalize_rows_backward(z2, n2, dz2);
  }

  Scalar total = 0;
  for (Index u = 0; u < batch; ++u)
    total += w(u) * (out.rec(u) + static_cast<Scalar>(cfg.cl_weight) * out.cl(u));
  out.total = total * inv_b;
  out.rec_mean = out.rec.mean();
  out.cl_mean = out.cl.mean();
  return out;
}

#define FACL_INSTANTIATE_OBJECTIVE(S)                                          \
  template S rec_loss<S>(const RowVectorX<S>&, ItemIndex);                     \
  template MatrixX<S> cosine_similarity<S>(const MatrixX<S>&,                  \
                                           const MatrixX<S>&);                 \
  template VectorX<S> infonce_per_anchor<S>(const MatrixX<S>&,                 \
                                            const MatrixX<S>&, S);             \
  template S infonce_loss<S>(const MatrixX<S>&, const MatrixX<S>&, S);         \
  template S total_loss<S>(std::span<const S>, std::span<const S>,             \
                           std::span<const S>, S);                             \
  template ObjectiveResult<S> evaluate_objective<S>(                           \
      const MatrixX<S>&, const MatrixX<S>*, const MatrixX<S>*,                 \
      std::span<const ItemIndex>, std::span<const double>, const MatrixX<S>&,  \
      const LossConfig&);

FACL_INSTANTIATE_OBJECTIVE(float)
FACL_INSTANTIATE_OBJECTIVE(double)

#undef FACL_INSTANTIATE_OBJECTIVE

}  // namespace facl
