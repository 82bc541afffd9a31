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

#include "pdw/denoiser.hpp"

#include <cmath>

#include "pdw/error.hpp"
#include "pdw/rng.hpp"

namespace pdw {
namespace {

void relu_inplace(Tensor& t) {
  for (double& v : t.data) v = v > 0.0 ? v : 0.0;
}

void add_inplace(Tensor& into, const Tensor& other) {
  for (std::size_t i = 0; i < into.data.size(); ++i) into.data[i] += other.data[i];
}

}  // namespace

void DenoiserArch::validate() const {
  if (channels.empty()) throw InvalidArgument("denoiser: need at least one encoder layer");
  for (std::size_t c : channels) {
    if (c == 0) throw InvalidArgument("denoiser: zero channel width");
  }
  if (stride == 0 || kernel < stride || (kernel - stride) % 2 != 0) {
    throw InvalidArgument("denoiser: kernel - stride must be even and non-negative");
  }
}

std::size_t DenoiserArch::stride_product() const {
  std::size_t p = 1;
  for (std::size_t i = 0; i < channels.size(); ++i) p *= stride;
  return p;
}

DenoiserModel::DenoiserModel(DenoiserArch arch) : arch_(std::move(arch)) {
  arch_.validate();
  const std::size_t d = arch_.depth();
  const std::size_t pad = arch_.padding();
  std::size_t offset = 0;
  auto add = [&](std::string name, LayerKind kind, ConvShape shape) {
    LayerInfo info{std::move(name), kind, shape, offset, offset + shape.weight_count()};
    offset = info.bias_offset + shape.out_channels;
    layers_.push_back(std::move(info));
  };
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t in = i == 0 ? 1 : arch_.channels[i - 1];
    add("encoder." + std::to_string(i), LayerKind::kEncoder,
        ConvShape{in, arch_.channels[i], arch_.kernel, arch_.stride, pad});
  }
  const std::size_t inner = arch_.channels.back();
  for (std::size_t j = 0; j < arch_.bottleneck_layers; ++j) {
    add("bottleneck." + std::to_string(j), LayerKind::kBottleneck, ConvShape{inner, inner, 1, 1, 0});
  }
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t in = arch_.channels[d - 1 - i];
    const std::size_t out = i + 1 == d ? 1 : arch_.channels[d - 2 - i];
    add("decoder." + std::to_string(i), LayerKind::kDecoder,
        ConvShape{in, out, arch_.kernel, arch_.stride, pad});
  }
  params_.assign(offset, 0.0);
}

DenoiserModel init_model(std::uint64_t seed, const DenoiserArch& arch) {
  DenoiserModel model(arch);
  Rng rng(derive_seed(seed, "denoiser-init"));
  for (const auto& l : model.layers()) {
    const double scale =
        1.0 / std::sqrt(static_cast<double>(l.shape.in_channels * l.shape.kernel));
    for (std::size_t i = 0; i < l.shape.weight_count(); ++i) {
      model.params()[l.weight_offset + i] = static_cast<float>(rng.normal() * scale);
    }
  }
  return model;
}

std::uint64_t ForwardTrace::kink_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<Tensor>& ts) {
    for (const auto& t : ts) {
      for (double v : t.data) {
        h ^= v > 0.0 ? 1u : 2u;
        h *= 0x100000001b3ULL;
      }
    }
  };
  mix(enc_pre);
  // All decoder layers but the last are rectified.
  for (std::size_t i = 0; i + 1 < dec_pre.size(); ++i) {
    for (double v : dec_pre[i].data) {
      h ^= v > 0.0 ? 1u : 2u;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

ForwardTrace forward_trace(const DenoiserModel& model, std::span<const double> noisy) {
  const auto& arch = model.arch();
  const std::size_t block = arch.stride_product();
  if (noisy.size() < block) {
    throw InvalidArgument("denoiser: input length " + std::to_string(noisy.size()) +
                          " is shorter than " + std::to_string(block) + " samples");
  }
  const std::size_t d = arch.depth();
  const std::size_t padded = (noisy.size() + block - 1) / block * block;
  const auto& layers = model.layers();

  ForwardTrace tr;
  tr.input_length = noisy.size();
  tr.input = Tensor(1, padded);
  std::copy(noisy.begin(), noisy.end(), tr.input.data.begin());

  std::size_t li = 0;
  for (std::size_t i = 0; i < d; ++i, ++li) {
    const Tensor& in = i == 0 ? tr.input : tr.enc_post.back();
    Tensor pre = conv1d_forward(layers[li].shape, model.weight(layers[li]), model.bias(layers[li]), in);
    Tensor post = pre;
    relu_inplace(post);
    tr.enc_pre.push_back(std::move(pre));
    tr.enc_post.push_back(std::move(post));
  }
  for (std::size_t j = 0; j < arch.bottleneck_layers; ++j, ++li) {
    const Tensor& in = j == 0 ? tr.enc_post.back() : tr.bott_post.back();
    Tensor pre = conv1d_forward(layers[li].shape, model.weight(layers[li]), model.bias(layers[li]), in);
    Tensor post = pre;
    for (double& v : post.data) v = std::tanh(v);
    tr.bott_pre.push_back(std::move(pre));
    tr.bott_post.push_back(std::move(post));
  }
  for (std::size_t i = 0; i < d; ++i, ++li) {
    Tensor in;
    if (i == 0) {
      in = arch.bottleneck_layers > 0 ? tr.bott_post.back() : tr.enc_post.back();
    } else {
      in = tr.dec_post.back();
    }
    add_inplace(in, tr.enc_post[d - 1 - i]);
    Tensor pre =
        conv_transpose1d_forward(layers[li].shape, model.weight(layers[li]), model.bias(layers[li]), in);
    Tensor post = pre;
    if (i + 1 < d) relu_inplace(post);
    tr.dec_in.push_back(std::move(in));
    tr.dec_pre.push_back(std::move(pre));
    tr.dec_post.push_back(std::move(post));
  }
  const Tensor& out = tr.dec_post.back();
  tr.output.assign(out.data.begin(), out.data.begin() + static_cast<long>(noisy.size()));
  return tr;
}

AudioBuffer forward(const DenoiserModel& model, const AudioBuffer& noisy) {
  validate(noisy);
  ForwardTrace tr = forward_trace(model, noisy.view());
  return AudioBuffer(std::move(tr.output), noisy.sample_rate);
}

ParamGradients backward(const DenoiserModel& model, const ForwardTrace& trace,
                        std::span<const double> upstream_grad) {
  if (upstream_grad.size() != trace.input_length) {
    throw InvalidArgument("denoiser backward: upstream gradient has " +
                          std::to_string(upstream_grad.size()) + " samples, output has " +
                          std::to_string(trace.input_length));
  }
  const auto& arch = model.arch();
  const auto& layers = model.layers();
  const std::size_t d = arch.depth();
  const std::size_t nb = arch.bottleneck_layers;

  ParamGradients out;
  out.grads.assign(model.params().size(), 0.0);
  out.encoder_output_grads.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.encoder_output_grads[i] = Tensor(trace.enc_post[i].channels, trace.enc_post[i].length);
  }
  auto wgrad = [&](const LayerInfo& l) {
    return std::span<double>(out.grads.data() + l.weight_offset, l.shape.weight_count());
  };
  auto bgrad = [&](const LayerInfo& l) {
    return std::span<double>(out.grads.data() + l.bias_offset, l.shape.out_channels);
  };

  Tensor g(1, trace.input.length);
  std::copy(upstream_grad.begin(), upstream_grad.end(), g.data.begin());

  // Decoder, last layer first.
  for (std::size_t i = d; i-- > 0;) {
    const LayerInfo& l = layers[d + nb + i];
    if (i + 1 < d) {
      const auto& pre = trace.dec_pre[i].data;
      for (std::size_t j = 0; j < g.data.size(); ++j) {
        if (pre[j] <= 0.0) g.data[j] = 0.0;
      }
    }
    Tensor grad_in;
    conv_transpose1d_backward(l.shape, model.weight(l), trace.dec_in[i], g, &grad_in, wgrad(l), bgrad(l));
    // The decoder input was prev + skip, so both receive grad_in.
    add_inplace(out.encoder_output_grads[d - 1 - i], grad_in);
    g = std::move(grad_in);
  }
  // g is now dL/d(bottleneck output).
  for (std::size_t j = nb; j-- > 0;) {
    const LayerInfo& l = layers[d + j];
    const auto& post = trace.bott_post[j].data;
    for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] *= 1.0 - post[k] * post[k];
    const Tensor& in = j == 0 ? trace.enc_post[d - 1] : trace.bott_post[j - 1];
    Tensor grad_in;
    conv1d_backward(l.shape, model.weight(l), in, g, &grad_in, wgrad(l), bgrad(l));
    g = std::move(grad_in);
  }
  add_inplace(out.encoder_output_grads[d - 1], g);

  for (std::size_t i = d; i-- > 0;) {
    const LayerInfo& l = layers[i];
    Tensor ge = out.encoder_output_grads[i];
    const auto& pre = trace.enc_pre[i].data;
    for (std::size_t k = 0; k < ge.data.size(); ++k) {
      if (pre[k] <= 0.0) ge.data[k] = 0.0;
    }
    const Tensor& in = i == 0 ? trace.input : trace.enc_post[i - 1];
    if (i == 0) {
      conv1d_backward(l.shape, model.weight(l), in, ge, nullptr, wgrad(l), bgrad(l));
    } else {
      Tensor grad_in;
      conv1d_backward(l.shape, model.weight(l), in, ge, &grad_in, wgrad(l), bgrad(l));
      add_inplace(out.encoder_output_grads[i - 1], grad_in);
    }
  }
  return out;
}

}  // namespace pdw
