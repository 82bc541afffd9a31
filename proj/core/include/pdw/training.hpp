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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pdw/audio.hpp"
#include "pdw/checkpoint.hpp"
#include "pdw/denoiser.hpp"
#include "pdw/embedding.hpp"
#include "pdw/losses.hpp"
#include "pdw/manifest.hpp"
#include "pdw/optimizer.hpp"

namespace pdw {

struct TrainingPair {
  std::string id;
  AudioBuffer noisy;
  AudioBuffer clean;
};

struct StepConfig {
  LossWeights weights;
  MultiResConfig resolutions = MultiResConfig::standard();
  double clip_norm = 5.0;  // global L2 norm; <= 0 disables
  int jobs = 1;            // per-example gradients; the reduction order is fixed
};

// Mean composite loss over the batch, evaluated before the update.
struct StepResult {
  double loss = 0.0;
  double grad_norm = 0.0;  // before clipping
};

// Averages per-example gradients of composite_loss(clean, forward(noisy))
// and applies one Adam update.
StepResult train_step(DenoiserModel& model, AdamState& optimizer,
                      std::span<const TrainingPair> batch, const StepConfig& config,
                      const PerceptualEmbedding& embedding);

// Mean composite loss without updating anything.
double evaluate_loss(const DenoiserModel& model, std::span<const TrainingPair> pairs,
                     const StepConfig& config, const PerceptualEmbedding& embedding);

struct FineTuneConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 4;
  double learning_rate = kDefaultLearningRate;
  // Optional first phase trained with gamma = 0 at its own learning rate.
  // The optimizer is reset when the second phase begins.
  std::size_t phase1_epochs = 0;
  double phase1_learning_rate = 1e-3;
  // When > 0, each example is cropped to a random window of this many
  // samples every epoch.
  std::size_t segment_length = 0;
  std::uint64_t seed = 0;
  StepConfig step;
  std::filesystem::path checkpoint_dir;  // empty disables per-epoch checkpoints

  void validate() const;
};

struct EpochReport {
  std::uint32_t epoch = 0;  // 1-based
  int phase = 2;
  double mean_loss = 0.0;
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(const EpochReport&)>;

std::filesystem::path epoch_checkpoint_path(const std::filesystem::path& dir, std::uint32_t epoch);

// Continues training from `start` (whose epoch field counts completed
// epochs) until config.epochs, writing epoch_NNN.ckpt after each epoch.
// Shuffling and cropping for epoch e depend only on (seed, e), so resuming
// from any saved checkpoint reproduces the unbroken run exactly.
Checkpoint fine_tune(Checkpoint start, std::span<const TrainingPair> data,
                     const FineTuneConfig& config, const PerceptualEmbedding& embedding,
                     const EpochCallback& on_epoch = {});

// Fresh checkpoint wrapping init_model(seed, arch).
Checkpoint initial_checkpoint(std::uint64_t seed, const DenoiserArch& arch,
                              const FineTuneConfig& config);

// Pairs every noisy entry with the clean entry named by its source_id
// (or its own id when source_id is empty).
std::vector<TrainingPair> load_training_pairs(const Manifest& noisy, const Manifest& clean);

}  // namespace pdw
