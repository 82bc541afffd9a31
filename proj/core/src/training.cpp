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

#include "pdw/training.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "pdw/error.hpp"
#include "pdw/parallel.hpp"
#include "pdw/rng.hpp"
#include "pdw/wav.hpp"

namespace pdw {
namespace {

struct ExampleResult {
  double loss = 0.0;
  std::vector<double> grads;
};

ExampleResult example_gradient(const DenoiserModel& model, const TrainingPair& pair,
                               const StepConfig& config, const PerceptualEmbedding& embedding) {
  const ForwardTrace trace = forward_trace(model, pair.noisy.view());
  const LossValueAndGrad loss = composite_loss(pair.clean.view(), trace.output, config.weights,
                                               config.resolutions, embedding);
  ParamGradients g = backward(model, trace, loss.grad);
  return {loss.value, std::move(g.grads)};
}

void check_pairs(std::span<const TrainingPair> pairs) {
  for (const auto& p : pairs) {
    if (p.noisy.size() != p.clean.size()) {
      throw InvalidArgument("training pair '" + p.id + "': noisy and clean lengths differ");
    }
  }
}

AudioBuffer crop(const AudioBuffer& in, std::size_t offset, std::size_t length) {
  AudioBuffer out;
  out.sample_rate = in.sample_rate;
  out.samples.assign(in.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                     in.samples.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return out;
}

}  // namespace

StepResult train_step(DenoiserModel& model, AdamState& optimizer,
                      std::span<const TrainingPair> batch, const StepConfig& config,
                      const PerceptualEmbedding& embedding) {
  if (batch.empty()) throw InvalidArgument("train_step: empty batch");
  check_pairs(batch);
  std::vector<ExampleResult> results(batch.size());
  parallel_for(batch.size(), config.jobs, [&](std::size_t i) {
    results[i] = example_gradient(model, batch[i], config, embedding);
  });

  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> grads(model.params().size(), 0.0);
  double loss = 0.0;
  for (const auto& r : results) {
    loss += r.loss;
    for (std::size_t k = 0; k < grads.size(); ++k) grads[k] += r.grads[k];
  }
  for (double& g : grads) g *= scale;

  StepResult out;
  out.loss = loss * scale;
  out.grad_norm = clip_grad_norm(grads, config.clip_norm);
  adam_update(optimizer, model.params(), grads);
  return out;
}

double evaluate_loss(const DenoiserModel& model, std::span<const TrainingPair> pairs,
                     const StepConfig& config, const PerceptualEmbedding& embedding) {
  if (pairs.empty()) throw InvalidArgument("evaluate_loss: no pairs");
  check_pairs(pairs);
  std::vector<double> losses(pairs.size());
  parallel_for(pairs.size(), config.jobs, [&](std::size_t i) {
    const AudioBuffer out = forward(model, pairs[i].noisy);
    losses[i] = composite_loss(pairs[i].clean.view(), out.view(), config.weights,
                               config.resolutions, embedding)
                    .value;
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(pairs.size());
}

void FineTuneConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch", "batch size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "learning rate must be positive and finite");
  }
  if (phase1_epochs > epochs) {
    throw ConfigError("phase1_epochs", "phase-1 epochs exceed total epochs");
  }
  if (phase1_epochs > 0 && (!(phase1_learning_rate > 0.0) || !std::isfinite(phase1_learning_rate))) {
    throw ConfigError("phase1_learning_rate", "learning rate must be positive and finite");
  }
  step.weights.validate();
  step.resolutions.validate();
}

std::filesystem::path epoch_checkpoint_path(const std::filesystem::path& dir, std::uint32_t epoch) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%03u.ckpt", epoch);
  return dir / name;
}

Checkpoint initial_checkpoint(std::uint64_t seed, const DenoiserArch& arch,
                              const FineTuneConfig& config) {
  Checkpoint ckpt;
  ckpt.model = init_model(seed, arch);
  ckpt.seed = seed;
  ckpt.weights = config.step.weights;
  ckpt.optimizer = AdamState::for_params(ckpt.model.params().size(),
                                         config.phase1_epochs > 0 ? config.phase1_learning_rate
                                                                  : config.learning_rate);
  return ckpt;
}

Checkpoint fine_tune(Checkpoint start, std::span<const TrainingPair> data,
                     const FineTuneConfig& config, const PerceptualEmbedding& embedding,
                     const EpochCallback& on_epoch) {
  config.validate();
  check_pairs(data);
  if (start.epoch >= config.epochs) return start;
  if (data.empty()) throw InvalidArgument("fine_tune: empty training set");
  if (!config.checkpoint_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.checkpoint_dir, ec);
    if (ec) {
      throw IoError("cannot create checkpoint directory " + config.checkpoint_dir.string() + ": " +
                    ec.message());
    }
  }

  Checkpoint ckpt = std::move(start);
  ckpt.weights = config.step.weights;
  const std::size_t n = data.size();
  std::vector<TrainingPair> batch;

  for (std::uint32_t e = ckpt.epoch; e < config.epochs; ++e) {
    const bool phase1 = e < config.phase1_epochs;
    StepConfig step = config.step;
    if (phase1) step.weights.gamma = 0.0;
    if (config.phase1_epochs > 0 && e == config.phase1_epochs) {
      ckpt.optimizer = AdamState::for_params(ckpt.model.params().size(), config.learning_rate);
    }
    ckpt.optimizer.learning_rate = phase1 ? config.phase1_learning_rate : config.learning_rate;

    Rng rng(derive_seed(config.seed, e));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < n; b += config.batch_size) {
      const std::size_t end = std::min(n, b + config.batch_size);
      batch.clear();
      for (std::size_t i = b; i < end; ++i) {
        const TrainingPair& p = data[order[i]];
        const std::size_t len = p.noisy.size();
        if (config.segment_length > 0 && len > config.segment_length) {
          const std::size_t offset = rng.below(len - config.segment_length + 1);
          batch.push_back({p.id, crop(p.noisy, offset, config.segment_length),
                           crop(p.clean, offset, config.segment_length)});
        } else {
          batch.push_back(p);
        }
      }
      const StepResult r = train_step(ckpt.model, ckpt.optimizer, batch, step, embedding);
      loss_sum += r.loss * static_cast<double>(batch.size());
      ++steps;
    }
    ckpt.epoch = e + 1;
    if (!config.checkpoint_dir.empty()) {
      save_checkpoint(ckpt, epoch_checkpoint_path(config.checkpoint_dir, ckpt.epoch));
    }
    if (on_epoch) {
      on_epoch({ckpt.epoch, phase1 ? 1 : 2, loss_sum / static_cast<double>(n), steps});
    }
  }
  return ckpt;
}

std::vector<TrainingPair> load_training_pairs(const Manifest& noisy, const Manifest& clean) {
  std::unordered_map<std::string, const Utterance*> by_id;
  for (const auto& u : clean.entries) by_id.emplace(u.id, &u);
  std::vector<TrainingPair> pairs;
  pairs.reserve(noisy.size());
  for (const auto& u : noisy.entries) {
    const std::string& key = u.source_id.empty() ? u.id : u.source_id;
    const auto it = by_id.find(key);
    if (it == by_id.end()) {
      throw InvalidArgument("training pair '" + u.id + "': no clean entry with id '" + key + "'");
    }
    TrainingPair p{u.id, load_wav(noisy.resolve(u)), load_wav(clean.resolve(*it->second))};
    if (p.noisy.size() != p.clean.size()) {
      throw InvalidArgument("training pair '" + u.id + "': noisy and clean lengths differ");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace pdw
