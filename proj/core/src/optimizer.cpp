// Copyright 2026 The pdw Authors
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

#include "pdw/optimizer.hpp"

#include <cmath>

#include "pdw/error.hpp"

namespace pdw {

AdamState AdamState::for_params(std::size_t count, double learning_rate) {
  AdamState s;
  s.m.assign(count, 0.0);
  s.v.assign(count, 0.0);
  s.learning_rate = learning_rate;
  return s;
}

void adam_update(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (state.m.size() != params.size() || state.v.size() != params.size() ||
      grads.size() != params.size()) {
    throw InvalidArgument("adam_update: moment/parameter/gradient shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    const double v = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    state.m[i] = static_cast<float>(m);
    state.v[i] = static_cast<float>(v);
    const double update = state.learning_rate * (m / c1) / (std::sqrt(v / c2) + state.epsilon);
    params[i] = static_cast<float>(params[i] - update);
  }
}

double clip_grad_norm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

}  // namespace pdw
