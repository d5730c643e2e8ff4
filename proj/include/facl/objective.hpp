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

#include <span>

#include "facl/types.hpp"

namespace facl {

// cl_weight scales the contrastive term in the total loss; temperature
// divides the cosine similarities inside InfoNCE.
struct LossConfig {
  double cl_weight = 0.1;
  double temperature = 1.0;
  bool symmetric = true;  // average both view directions

  void validate() const;
};

// -log probs[target]; a zero probability is clamped at 1e-300 with a warning.
template <typename Scalar>
Scalar rec_loss(const RowVectorX<Scalar>& probs, ItemIndex target);

// Row-wise cosine similarities. Throws Error(kNumerical) on a zero row.
template <typename Scalar>
MatrixX<Scalar> cosine_similarity(const MatrixX<Scalar>& a,
                                  const MatrixX<Scalar>& b);

// InfoNCE per anchor: anchor u's positive is candidate u, every other
// candidate in the batch is a negative, and the positive is part of the
// denominator.
template <typename Scalar>
VectorX<Scalar> infonce_per_anchor(const MatrixX<Scalar>& anchors,
                                   const MatrixX<Scalar>& candidates,
                                   Scalar temperature);

// Mean of infonce_per_anchor.
template <typename Scalar>
Scalar infonce_loss(const MatrixX<Scalar>& anchors,
                    const MatrixX<Scalar>& candidates, Scalar temperature);

// (1/B) sum_u w_u (rec_u + cl_weight * cl_u).
template <typename Scalar>
Scalar total_loss(std::span<const Scalar> rec, std::span<const Scalar> cl,
                  std::span<const Scalar> weights, Scalar cl_weight);

template <typename Scalar>
struct ObjectiveResult {
  Scalar total = 0;
  Scalar rec_mean = 0;  // unweighted means, for logging
  Scalar cl_mean = 0;
  VectorX<Scalar> rec;
  VectorX<Scalar> cl;
  MatrixX<Scalar> d_repr;   // B x d
  MatrixX<Scalar> d_view1;  // empty without views
  MatrixX<Scalar> d_view2;
  MatrixX<Scalar> d_item_embeddings;  // from the scoring layer only
};

// Weighted joint objective and its gradients with respect to the three
// representation batches and the (tied) item embedding matrix. Pass null
// views for a recommendation-only objective.
template <typename Scalar>
ObjectiveResult<Scalar> evaluate_objective(
    const MatrixX<Scalar>& repr, const MatrixX<Scalar>* view1,
    const MatrixX<Scalar>* view2, std::span<const ItemIndex> targets,
    std::span<const double> weights, const MatrixX<Scalar>& item_embeddings,
    const LossConfig& cfg);

}  // namespace facl
