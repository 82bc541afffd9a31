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
#include <string>
#include <vector>

#include "pdw/audio.hpp"
#include "pdw/conv.hpp"

namespace pdw {

// Encoder/decoder layout. The encoder is `channels.size()` strided
// convolutions with rectifiers; the bottleneck is `bottleneck_layers`
// width-1 convolutions with tanh; the decoder mirrors the encoder with
// transposed convolutions, each adding the matching encoder activation
// to its input. The last decoder layer is linear and emits one channel.
struct DenoiserArch {
  std::vector<std::size_t> channels{16, 32, 64};
  std::size_t kernel = 8;
  std::size_t stride = 4;
  std::size_t bottleneck_layers = 2;

  static DenoiserArch standard() { return {}; }
  void validate() const;
  std::size_t depth() const { return channels.size(); }
  // Input lengths are padded to a multiple of stride^depth.
  std::size_t stride_product() const;
  std::size_t padding() const { return (kernel - stride) / 2; }

  friend bool operator==(const DenoiserArch&, const DenoiserArch&) = default;
};

enum class LayerKind { kEncoder, kBottleneck, kDecoder };

struct LayerInfo {
  std::string name;  // "encoder.0", "bottleneck.1", "decoder.2", ...
  LayerKind kind;
  ConvShape shape;
  std::size_t weight_offset = 0;  // into the flat parameter vector
  std::size_t bias_offset = 0;

  friend bool operator==(const LayerInfo&, const LayerInfo&) = default;
};

class DenoiserModel {
 public:
  DenoiserModel() = default;
  // Parameter storage is zero-initialized; see init_model for seeding.
  explicit DenoiserModel(DenoiserArch arch);

  const DenoiserArch& arch() const { return arch_; }
  const std::vector<LayerInfo>& layers() const { return layers_; }

  // Flat parameter vector: per layer, weights then biases, layers in
  // encoder, bottleneck, decoder order.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::span<const double> weight(const LayerInfo& l) const {
    return {params_.data() + l.weight_offset, l.shape.weight_count()};
  }
  std::span<const double> bias(const LayerInfo& l) const {
    return {params_.data() + l.bias_offset, l.shape.out_channels};
  }

  friend bool operator==(const DenoiserModel&, const DenoiserModel&) = default;

 private:
  DenoiserArch arch_;
  std::vector<LayerInfo> layers_;
  std::vector<double> params_;
};

// Weights ~ N(0,1)/sqrt(in_channels*kernel) rounded to float32; biases zero.
DenoiserModel init_model(std::uint64_t seed, const DenoiserArch& arch = DenoiserArch::standard());

// Cached intermediates of one forward pass, consumed by backward().
struct ForwardTrace {
  std::size_t input_length = 0;  // before padding
  Tensor input;                   // padded
  std::vector<Tensor> enc_pre, enc_post;
  std::vector<Tensor> bott_pre, bott_post;
  std::vector<Tensor> dec_in, dec_pre, dec_post;
  std::vector<double> output;  // trimmed to input_length

  // Sign pattern of every rectifier input.
  std::uint64_t kink_hash() const;
};

ForwardTrace forward_trace(const DenoiserModel& model, std::span<const double> noisy);

// Output has the input's length. Input must hold >= stride^depth samples.
AudioBuffer forward(const DenoiserModel& model, const AudioBuffer& noisy);

struct ParamGradients {
  std::vector<double> grads;                 // same layout as params()
  std::vector<Tensor> encoder_output_grads;  // dL/d(encoder activation), skip + deep paths
};

// Exact reverse-mode gradients for `upstream_grad` = dL/d(output).
ParamGradients backward(const DenoiserModel& model, const ForwardTrace& trace,
                        std::span<const double> upstream_grad);

}  // namespace pdw
