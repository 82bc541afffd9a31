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

#include "pdw/embedding.hpp"

#include <cmath>
#include <cstring>

#include "pdw/binary_io.hpp"
#include "pdw/error.hpp"
#include "pdw/rng.hpp"

namespace pdw {
namespace {

constexpr char kMagic[8] = {'P', 'D', 'W', 'E', 'M', 'B', '0', '1'};

}  // namespace

std::vector<EmbeddingLayerSpec> PerceptualEmbedding::default_layers() {
  return {{1, 16, 15}, {16, 32, 15}, {32, 64, 15}, {64, 128, 15}};
}

void PerceptualEmbedding::validate_layers(const std::vector<EmbeddingLayerSpec>& layers) {
  if (layers.empty()) throw InvalidArgument("embedding: no layers");
  if (layers.front().in_channels != 1) throw InvalidArgument("embedding: first layer must take 1 channel");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.in_channels == 0 || l.out_channels == 0 || l.kernel == 0) {
      throw InvalidArgument("embedding: zero-sized layer");
    }
    if (i > 0 && l.in_channels != layers[i - 1].out_channels) {
      throw InvalidArgument("embedding: channel mismatch between layers");
    }
  }
}

PerceptualEmbedding PerceptualEmbedding::from_seed(std::uint64_t seed,
                                                   std::vector<EmbeddingLayerSpec> layers) {
  validate_layers(layers);
  PerceptualEmbedding emb;
  Rng rng(derive_seed(seed, "perceptual-embedding"));
  for (const auto& spec : layers) {
    Layer layer;
    layer.spec = spec;
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.in_channels * spec.kernel));
    layer.weight.resize(spec.in_channels * spec.out_channels * spec.kernel);
    for (double& w : layer.weight) w = static_cast<float>(rng.normal() * scale);
    layer.bias.resize(spec.out_channels);
    for (double& b : layer.bias) b = static_cast<float>(0.1 * rng.normal() * scale);
    emb.layers_.push_back(std::move(layer));
  }
  return emb;
}

PerceptualEmbedding PerceptualEmbedding::load(const std::filesystem::path& path) {
  BinaryReader in(path);
  char magic[8];
  in.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw FormatError(path.string() + ": not an embedding checkpoint (bad magic)");
  }
  const std::uint32_t count = in.u32();
  if (count == 0 || count > 64) throw FormatError(path.string() + ": bad layer count");
  std::vector<EmbeddingLayerSpec> specs(count);
  for (auto& s : specs) {
    s.in_channels = in.u32();
    s.out_channels = in.u32();
    s.kernel = in.u32();
  }
  try {
    validate_layers(specs);
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  PerceptualEmbedding emb;
  for (const auto& s : specs) {
    Layer layer;
    layer.spec = s;
    layer.weight = in.f32_array(s.in_channels * s.out_channels * s.kernel);
    layer.bias = in.f32_array(s.out_channels);
    emb.layers_.push_back(std::move(layer));
  }
  in.expect_end();
  return emb;
}

void PerceptualEmbedding::save(const std::filesystem::path& path) const {
  BinaryWriter out;
  out.bytes(kMagic, sizeof(kMagic));
  out.u32(static_cast<std::uint32_t>(layers_.size()));
  for (const auto& l : layers_) {
    out.u32(static_cast<std::uint32_t>(l.spec.in_channels));
    out.u32(static_cast<std::uint32_t>(l.spec.out_channels));
    out.u32(static_cast<std::uint32_t>(l.spec.kernel));
  }
  for (const auto& l : layers_) {
    out.f32_array(l.weight);
    out.f32_array(l.bias);
  }
  out.write_file(path);
}

std::size_t PerceptualEmbedding::receptive_field() const {
  std::size_t rf = 1;
  std::size_t jump = 1;
  for (const auto& l : layers_) {
    rf += (l.spec.kernel - 1) * jump;
    jump *= kStride;
  }
  return rf;
}

ConvShape PerceptualEmbedding::shape(std::size_t i) const {
  const auto& s = layers_[i].spec;
  return ConvShape{s.in_channels, s.out_channels, s.kernel, kStride, 0};
}

PerceptualEmbedding::Activations PerceptualEmbedding::forward(std::span<const double> signal) const {
  if (signal.size() < receptive_field()) {
    throw InvalidArgument("perceptual embedding: input length " + std::to_string(signal.size()) +
                          " is shorter than the receptive field " +
                          std::to_string(receptive_field()));
  }
  Activations acts;
  acts.input_length = signal.size();
  Tensor x(1, signal.size());
  std::copy(signal.begin(), signal.end(), x.data.begin());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Tensor& in = i == 0 ? x : acts.post.back();
    Tensor pre = conv1d_forward(shape(i), layers_[i].weight, layers_[i].bias, in);
    Tensor post = pre;
    for (double& v : post.data) v = v > 0.0 ? v : kLeakySlope * v;
    acts.pre.push_back(std::move(pre));
    acts.post.push_back(std::move(post));
  }
  return acts;
}

std::vector<double> PerceptualEmbedding::backward(const Activations& acts,
                                                  const std::vector<Tensor>& grad_post) const {
  if (grad_post.size() != layers_.size() || acts.pre.size() != layers_.size()) {
    throw InvalidArgument("perceptual embedding backward: layer count mismatch");
  }
  Tensor carry;  // dL/d(post) flowing down from deeper layers
  for (std::size_t li = layers_.size(); li-- > 0;) {
    Tensor g = grad_post[li];
    if (!carry.data.empty()) {
      for (std::size_t j = 0; j < g.data.size(); ++j) g.data[j] += carry.data[j];
    }
    const Tensor& pre = acts.pre[li];
    for (std::size_t j = 0; j < g.data.size(); ++j) {
      if (pre.data[j] <= 0.0) g.data[j] *= kLeakySlope;
    }
    const Tensor* input = nullptr;
    Tensor x;
    if (li == 0) {
      // Only the shape is read for the input-gradient computation.
      x = Tensor(1, acts.input_length);
      input = &x;
    } else {
      input = &acts.post[li - 1];
    }
    Tensor grad_in;
    conv1d_backward(shape(li), layers_[li].weight, *input, g, &grad_in, {}, {});
    carry = std::move(grad_in);
  }
  return carry.data;
}

bool operator==(const PerceptualEmbedding& a, const PerceptualEmbedding& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (!(a.layers_[i].spec == b.layers_[i].spec) || a.layers_[i].weight != b.layers_[i].weight ||
        a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

}  // namespace pdw
