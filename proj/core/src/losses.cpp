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

#include "pdw/losses.hpp"

#include <cmath>
#include <string>

#include "pdw/error.hpp"
#include "pdw/format.hpp"

namespace pdw {
namespace {

void require_same_length(std::span<const double> y, std::span<const double> yhat, const char* op) {
  if (y.size() != yhat.size()) {
    throw InvalidArgument(std::string(op) + ": length mismatch (" + std::to_string(y.size()) +
                          " vs " + std::to_string(yhat.size()) + ")");
  }
  if (y.empty()) throw InvalidArgument(std::string(op) + ": empty input");
}

void accumulate(LossValueAndGrad& into, const LossValueAndGrad& part, double scale) {
  into.value += scale * part.value;
  for (std::size_t i = 0; i < into.grad.size(); ++i) into.grad[i] += scale * part.grad[i];
}

// d|c|/dc with the magnitude floored, as dRe + i dIm.
Complex magnitude_direction(const Complex& c) {
  return c / std::max(std::abs(c), kMagnitudeFloor);
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("loss weights must be finite and >= 0, got " + format_double(w));
    }
  }
}

MultiResConfig MultiResConfig::standard() {
  return MultiResConfig{{{512, 50, 240}, {1024, 120, 600}, {2048, 240, 1200}}};
}

void MultiResConfig::validate() const {
  if (resolutions.empty()) throw InvalidArgument("multi-resolution config needs >= 1 resolution");
  for (const auto& r : resolutions) r.validate();
}

LossValueAndGrad l1_loss(std::span<const double> y, std::span<const double> yhat, KinkTrace* trace) {
  require_same_length(y, yhat, "l1_loss");
  LossValueAndGrad out;
  out.grad.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    out.value += std::abs(d);
    out.grad[i] = d > 0.0 ? -1.0 : (d < 0.0 ? 1.0 : 0.0);
    if (trace) trace->mix(d > 0.0);
  }
  return out;
}

LossValueAndGrad spectral_convergence(std::span<const double> y, std::span<const double> yhat,
                                      const StftResolution& res, KinkTrace* trace) {
  require_same_length(y, yhat, "spectral_convergence");
  const Spectrogram sy = stft(y, res);
  const Spectrogram sh = stft(yhat, res);
  const std::size_t n = sy.data.size();
  std::vector<double> a(n), b(n);
  double num2 = 0.0, den2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::abs(sy.data[i]);
    b[i] = std::abs(sh.data[i]);
    num2 += (a[i] - b[i]) * (a[i] - b[i]);
    den2 += a[i] * a[i];
  }
  if (den2 == 0.0) throw InvalidArgument("spectral_convergence: zero reference");
  const double num = std::sqrt(num2);
  const double den = std::sqrt(den2);
  LossValueAndGrad out;
  out.value = num / den;
  if (num == 0.0) {
    out.grad.assign(y.size(), 0.0);
    return out;
  }
  std::vector<Complex> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (trace) {
      trace->mix(b[i] > kMagnitudeFloor);
      trace->modulus(sh.data[i]);
    }
    const double dv_db = -(a[i] - b[i]) / (num * den);
    g[i] = dv_db * magnitude_direction(sh.data[i]);
  }
  out.grad = stft_backward(g, y.size(), res);
  return out;
}

LossValueAndGrad log_magnitude_distance(std::span<const double> ref_mag,
                                        std::span<const double> est_mag, KinkTrace* trace) {
  require_same_length(ref_mag, est_mag, "log_magnitude_distance");
  const double inv_t = 1.0 / static_cast<double>(ref_mag.size());
  LossValueAndGrad out;
  out.grad.resize(est_mag.size());
  for (std::size_t i = 0; i < ref_mag.size(); ++i) {
    const double b = est_mag[i];
    const double d = std::log(std::max(ref_mag[i], kMagnitudeFloor)) -
                     std::log(std::max(b, kMagnitudeFloor));
    out.value += std::abs(d);
    const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    // d/db log max(b, eps) is 1/b above the floor and 0 below it.
    out.grad[i] = b > kMagnitudeFloor ? -s * inv_t / b : 0.0;
    if (trace) {
      trace->mix(d > 0.0);
      trace->mix(b > kMagnitudeFloor);
    }
  }
  out.value *= inv_t;
  return out;
}

LossValueAndGrad log_stft_magnitude(std::span<const double> y, std::span<const double> yhat,
                                    const StftResolution& res, KinkTrace* trace) {
  require_same_length(y, yhat, "log_stft_magnitude");
  const Spectrogram sy = stft(y, res);
  const Spectrogram sh = stft(yhat, res);
  const std::vector<double> a = sy.magnitudes();
  const std::vector<double> b = sh.magnitudes();
  LossValueAndGrad mag = log_magnitude_distance(a, b, trace);
  if (trace) {
    for (const Complex& c : sh.data) trace->modulus(c);
  }
  std::vector<Complex> g(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) g[i] = mag.grad[i] * magnitude_direction(sh.data[i]);
  LossValueAndGrad out;
  out.value = mag.value;
  out.grad = stft_backward(g, y.size(), res);
  return out;
}

LossValueAndGrad stft_loss(std::span<const double> y, std::span<const double> yhat,
                           const StftResolution& res, KinkTrace* trace) {
  LossValueAndGrad sc = spectral_convergence(y, yhat, res, trace);
  const LossValueAndGrad mag = log_stft_magnitude(y, yhat, res, trace);
  sc.value += mag.value;
  for (std::size_t i = 0; i < sc.grad.size(); ++i) sc.grad[i] += mag.grad[i];
  return sc;
}

LossValueAndGrad multi_res_stft_loss(std::span<const double> y, std::span<const double> yhat,
                                     const MultiResConfig& config, KinkTrace* trace) {
  config.validate();
  require_same_length(y, yhat, "multi_res_stft_loss");
  LossValueAndGrad out;
  out.grad.assign(y.size(), 0.0);
  for (const auto& res : config.resolutions) accumulate(out, stft_loss(y, yhat, res, trace), 1.0);
  return out;
}

LossValueAndGrad perceptual_distance(std::span<const double> y, std::span<const double> yhat,
                                     const PerceptualEmbedding& embedding, KinkTrace* trace) {
  require_same_length(y, yhat, "perceptual_distance");
  const auto fy = embedding.forward(y);
  const auto fh = embedding.forward(yhat);
  LossValueAndGrad out;
  std::vector<Tensor> grad_post;
  grad_post.reserve(fy.post.size());
  for (std::size_t l = 0; l < fy.post.size(); ++l) {
    const auto& ay = fy.post[l].data;
    const auto& ah = fh.post[l].data;
    const double inv = 1.0 / static_cast<double>(ay.size());
    Tensor g(fh.post[l].channels, fh.post[l].length);
    double layer_sum = 0.0;
    for (std::size_t j = 0; j < ay.size(); ++j) {
      const double d = ay[j] - ah[j];
      layer_sum += std::abs(d);
      g.data[j] = d > 0.0 ? -inv : (d < 0.0 ? inv : 0.0);
      if (trace) {
        trace->mix(d > 0.0);
        trace->mix(fh.pre[l].data[j] > 0.0);
      }
    }
    out.value += layer_sum * inv;
    grad_post.push_back(std::move(g));
  }
  out.grad = embedding.backward(fh, grad_post);
  return out;
}

LossValueAndGrad composite_loss(std::span<const double> y, std::span<const double> yhat,
                                const LossWeights& weights, const MultiResConfig& config,
                                const PerceptualEmbedding& embedding, KinkTrace* trace) {
  weights.validate();
  require_same_length(y, yhat, "composite_loss");
  LossValueAndGrad out;
  out.grad.assign(y.size(), 0.0);
  if (weights.alpha != 0.0) accumulate(out, l1_loss(y, yhat, trace), weights.alpha);
  if (weights.beta != 0.0) accumulate(out, multi_res_stft_loss(y, yhat, config, trace), weights.beta);
  if (weights.gamma != 0.0) {
    accumulate(out, perceptual_distance(y, yhat, embedding, trace), weights.gamma);
  }
  return out;
}

}  // namespace pdw
