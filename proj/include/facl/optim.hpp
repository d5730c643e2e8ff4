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

#include <cstdint>

#include "facl/model.hpp"

namespace facl {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  ModelParams<Scalar> first_moment;
  ModelParams<Scalar> second_moment;
  std::int64_t step = 0;

  static AdamState for_params(const ModelParams<Scalar>& params) {
    return {ModelParams<Scalar>::zeros_like(params),
            ModelParams<Scalar>::zeros_like(params), 0};
  }
};

// One bias-corrected Adam update. Throws Error(kNumerical) naming the
// tensor if an update would make a parameter non-finite; parameters are
// left untouched in that case.
template <typename Scalar>
void adam_step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grads,
               AdamState<Scalar>& state, const AdamConfig& cfg);

// Scales gradients so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
template <typename Scalar>
Scalar clip_global_norm(ModelParams<Scalar>& grads, Scalar max_norm);

}  // namespace facl
