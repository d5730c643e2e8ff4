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

#include "facl/optim.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace facl {

namespace {

template <typename Scalar>
using FlatMap = Eigen::Map<VectorX<Scalar>>;

template <typename Scalar>
std::vector<FlatMap<Scalar>> flatten(ModelParams<Scalar>& p) {
  std::vector<FlatMap<Scalar>> out;
  for_each_tensor(p, [&](const std::string&, auto& t) {
    out.emplace_back(t.data(), t.size());
  });
  return out;
}

std::vector<std::string> tensor_names(const auto& p) {
  std::vector<std::string> out;
  for_each_tensor(p, [&](const std::string& name, const auto&) { out.push_back(name); });
  return out;
}

}  // namespace

template <typename Scalar>
void adam_step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grads,
               AdamState<Scalar>& state, const AdamConfig& cfg) {
  const std::int64_t t = state.step + 1;
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
  const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);

  // Updates go to copies first so a failure leaves params and state intact.
  ModelParams<Scalar> m = state.first_moment;
  ModelParams<Scalar> v = state.second_moment;
  ModelParams<Scalar> next = params;
  ModelParams<Scalar> g = grads;
  auto pm = flatten(m), pv = flatten(v), pp = flatten(next), pg = flatten(g);
  if (pm.size() != pg.size() || pp.size() != pg.size())
    throw Error(ErrorCode::kInvalidArgument, "Adam: parameter/gradient shape mismatch");
  const auto names = tensor_names(params);
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i].size() != pg[i].size() || pm[i].size() != pg[i].size())
      throw Error(ErrorCode::kInvalidArgument, "Adam: shape mismatch in tensor " + names[i]);
    pm[i] = b1 * pm[i] + (Scalar(1) - b1) * pg[i];
    pv[i] = b2 * pv[i] + (Scalar(1) - b2) * pg[i].cwiseAbs2();
    pp[i].array() -= lr * (pm[i].array() / c1) / ((pv[i].array() / c2).sqrt() + eps);
    if (!pp[i].allFinite())
      throw Error(ErrorCode::kNumerical, "non-finite Adam update in tensor " + names[i]);
  }
  params = std::move(next);
  state.first_moment = std::move(m);
  state.second_moment = std::move(v);
  state.step = t;
}

template <typename Scalar>
Scalar clip_global_norm(ModelParams<Scalar>& grads, Scalar max_norm) {
  Scalar sq = 0;
  for_each_tensor(grads, [&](const std::string&, const auto& g) { sq += g.squaredNorm(); });
  const Scalar norm = std::sqrt(sq);
  if (norm > max_norm && norm > Scalar(0)) {
    const Scalar s = max_norm / norm;
    for_each_tensor(grads, [&](const std::string&, auto& g) { g *= s; });
  }
  return norm;
}

template void adam_step<float>(ModelParams<float>&, const ModelParams<float>&,
                               AdamState<float>&, const AdamConfig&);
template void adam_step<double>(ModelParams<double>&, const ModelParams<double>&,
                                AdamState<double>&, const AdamConfig&);
template float clip_global_norm<float>(ModelParams<float>&, float);
template double clip_global_norm<double>(ModelParams<double>&, double);

}  // namespace facl
