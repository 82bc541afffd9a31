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

#include "pdw/checkpoint.hpp"

#include <cstring>

#include "pdw/binary_io.hpp"
#include "pdw/error.hpp"

namespace pdw {
namespace {

constexpr char kMagic[8] = {'P', 'D', 'W', 'C', 'K', 'P', 'T', '\0'};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto& arch = ckpt.model.arch();
  const auto& params = ckpt.model.params();
  if (ckpt.optimizer.m.size() != params.size() || ckpt.optimizer.v.size() != params.size()) {
    throw InvalidArgument("checkpoint: optimizer moments do not match parameters");
  }
  BinaryWriter out;
  out.bytes(kMagic, sizeof(kMagic));
  out.u32(kCheckpointVersion);
  out.u64(ckpt.seed);
  out.u32(static_cast<std::uint32_t>(arch.depth()));
  out.u32(static_cast<std::uint32_t>(arch.kernel));
  out.u32(static_cast<std::uint32_t>(arch.stride));
  out.u32(static_cast<std::uint32_t>(arch.bottleneck_layers));
  for (std::size_t c : arch.channels) out.u32(static_cast<std::uint32_t>(c));
  out.f64(ckpt.weights.alpha);
  out.f64(ckpt.weights.beta);
  out.f64(ckpt.weights.gamma);
  out.u32(ckpt.epoch);
  out.u64(ckpt.optimizer.step);
  out.f64(ckpt.optimizer.learning_rate);
  out.f64(ckpt.optimizer.beta1);
  out.f64(ckpt.optimizer.beta2);
  out.f64(ckpt.optimizer.epsilon);
  out.u64(params.size());
  out.f32_array(params);
  out.f32_array(ckpt.optimizer.m);
  out.f32_array(ckpt.optimizer.v);
  out.write_file(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  BinaryReader in(path);
  const std::string where = path.string();
  char magic[8];
  in.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw FormatError(where + ": not a denoiser checkpoint (bad magic)");
  }
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw FormatError(where + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.seed = in.u64();
  DenoiserArch arch;
  const std::uint32_t depth = in.u32();
  if (depth == 0 || depth > 16) throw FormatError(where + ": bad architecture depth");
  arch.kernel = in.u32();
  arch.stride = in.u32();
  arch.bottleneck_layers = in.u32();
  arch.channels.resize(depth);
  for (auto& c : arch.channels) c = in.u32();
  try {
    ckpt.model = DenoiserModel(arch);
  } catch (const InvalidArgument& e) {
    throw FormatError(where + ": " + e.what());
  }
  ckpt.weights.alpha = in.f64();
  ckpt.weights.beta = in.f64();
  ckpt.weights.gamma = in.f64();
  ckpt.epoch = in.u32();
  ckpt.optimizer.step = in.u64();
  ckpt.optimizer.learning_rate = in.f64();
  ckpt.optimizer.beta1 = in.f64();
  ckpt.optimizer.beta2 = in.f64();
  ckpt.optimizer.epsilon = in.f64();
  const std::uint64_t count = in.u64();
  if (count != ckpt.model.params().size()) {
    throw FormatError(where + ": parameter count " + std::to_string(count) +
                      " does not match the architecture");
  }
  ckpt.model.params() = in.f32_array(count);
  ckpt.optimizer.m = in.f32_array(count);
  ckpt.optimizer.v = in.f32_array(count);
  in.expect_end();
  return ckpt;
}

}  // namespace pdw
