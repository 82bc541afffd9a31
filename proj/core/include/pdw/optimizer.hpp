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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pdw {

inline constexpr double kDefaultLearningRate = 3e-5;

// Adaptive-moment (Adam) state for a flat parameter vector.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double learning_rate = kDefaultLearningRate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(std::size_t count, double learning_rate = kDefaultLearningRate);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected update. Parameters and moments are rounded to
// float32 afterwards so the in-memory state always equals what a
// checkpoint stores.
void adam_update(AdamState& state, std::span<double> params, std::span<const double> grads);

// Scales grads in place so their L2 norm is at most max_norm (<= 0 disables).
// Returns the norm before clipping.
double clip_grad_norm(std::span<double> grads, double max_norm);

}  // namespace pdw
