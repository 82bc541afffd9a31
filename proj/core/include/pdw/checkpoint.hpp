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
#include <filesystem>

#include "pdw/denoiser.hpp"
#include "pdw/losses.hpp"
#include "pdw/optimizer.hpp"

namespace pdw {

struct Checkpoint {
  DenoiserModel model;
  AdamState optimizer;
  std::uint64_t seed = 0;
  LossWeights weights;
  std::uint32_t epoch = 0;  // completed epochs

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Little-endian layout:
//   "PDWCKPT\0", u32 version, u64 seed,
//   architecture: u32 depth, u32 kernel, u32 stride, u32 bottleneck layers,
//                 u32 channels[depth],
//   f64 alpha, beta, gamma, u32 epoch,
//   u64 step, f64 learning rate, beta1, beta2, epsilon,
//   u64 parameter count, f32 params[count], f32 m[count], f32 v[count]
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pdw
