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
#include <span>
#include <vector>

#include "pdw/conv.hpp"

namespace pdw {

struct EmbeddingLayerSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 15;

  friend bool operator==(const EmbeddingLayerSpec&, const EmbeddingLayerSpec&) = default;
};

// Fixed deep-feature network used as a perceptual distance: a stack of
// valid (unpadded) stride-4 convolutions, each followed by a leaky
// rectifier with slope 0.1. Weights never change after construction.
class PerceptualEmbedding {
 public:
  static constexpr std::size_t kStride = 4;
  static constexpr double kLeakySlope = 0.1;

  // 1 -> 16 -> 32 -> 64 -> 128 channels, kernel width 15.
  static std::vector<EmbeddingLayerSpec> default_layers();

  // Weights ~ N(0,1)/sqrt(in*kernel), biases ~ 0.1*N(0,1)/sqrt(in*kernel),
  // all rounded to float32 so a saved copy reloads bit-identically.
  static PerceptualEmbedding from_seed(std::uint64_t seed,
                                       std::vector<EmbeddingLayerSpec> layers = default_layers());

  // Little-endian: "PDWEMB01", u32 layer count, per layer u32 (in, out,
  // kernel), then per layer float32 weights [out][in][k] and biases.
  static PerceptualEmbedding load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t layer_count() const { return layers_.size(); }
  const EmbeddingLayerSpec& layer_spec(std::size_t i) const { return layers_[i].spec; }
  std::span<const double> weights(std::size_t i) const { return layers_[i].weight; }
  std::span<const double> biases(std::size_t i) const { return layers_[i].bias; }

  // Smallest input length yielding one output frame at the last layer.
  std::size_t receptive_field() const;

  struct Activations {
    std::size_t input_length = 0;
    std::vector<Tensor> pre;   // conv outputs
    std::vector<Tensor> post;  // after the leaky rectifier
  };

  Activations forward(std::span<const double> signal) const;

  // Given dL/d(post) for every layer, returns dL/d(signal).
  std::vector<double> backward(const Activations& acts, const std::vector<Tensor>& grad_post) const;

  friend bool operator==(const PerceptualEmbedding& a, const PerceptualEmbedding& b);

 private:
  struct Layer {
    EmbeddingLayerSpec spec;
    std::vector<double> weight;
    std::vector<double> bias;
  };
  ConvShape shape(std::size_t i) const;
  static void validate_layers(const std::vector<EmbeddingLayerSpec>& layers);

  std::vector<Layer> layers_;
};

}  // namespace pdw
