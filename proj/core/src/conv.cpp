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

#include "pdw/conv.hpp"

#include <algorithm>

#include "pdw/error.hpp"

namespace pdw {
namespace {

// Output positions t for which 0 <= t*S + k - P < L.
struct TapRange {
  std::size_t begin;
  std::size_t end;
};

TapRange valid_range(std::size_t k, std::size_t stride, std::size_t padding, std::size_t in_len,
                     std::size_t out_len) {
  const long long off = static_cast<long long>(k) - static_cast<long long>(padding);
  const long long s = static_cast<long long>(stride);
  long long lo = off >= 0 ? 0 : (-off + s - 1) / s;
  long long hi = (static_cast<long long>(in_len) - 1 - off);
  hi = hi < 0 ? -1 : hi / s;
  lo = std::max<long long>(lo, 0);
  hi = std::min<long long>(hi, static_cast<long long>(out_len) - 1);
  if (hi < lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi + 1)};
}

void check(const ConvShape& shape, std::span<const double> weight, std::span<const double> bias,
           const Tensor& input, std::size_t in_channels) {
  if (weight.size() != shape.weight_count()) throw InvalidArgument("conv: weight shape mismatch");
  if (!bias.empty() && bias.size() != shape.out_channels) throw InvalidArgument("conv: bias shape mismatch");
  if (input.channels != in_channels) throw InvalidArgument("conv: input channel mismatch");
}

}  // namespace

std::size_t ConvShape::conv_output_length(std::size_t input_length) const {
  const std::size_t padded = input_length + 2 * padding;
  if (padded < kernel) return 0;
  return (padded - kernel) / stride + 1;
}

std::size_t ConvShape::transposed_output_length(std::size_t input_length) const {
  if (input_length == 0) return 0;
  return (input_length - 1) * stride + kernel - 2 * padding;
}

Tensor conv1d_forward(const ConvShape& shape, std::span<const double> weight,
                      std::span<const double> bias, const Tensor& input) {
  check(shape, weight, bias, input, shape.in_channels);
  const std::size_t out_len = shape.conv_output_length(input.length);
  if (out_len == 0) throw InvalidArgument("conv: input shorter than kernel");
  Tensor out(shape.out_channels, out_len);
  const std::size_t S = shape.stride;
  for (std::size_t oc = 0; oc < shape.out_channels; ++oc) {
    double* o = out.row(oc);
    if (!bias.empty()) std::fill(o, o + out_len, bias[oc]);
    for (std::size_t ic = 0; ic < shape.in_channels; ++ic) {
      const double* x = input.row(ic);
      const double* w = &weight[(oc * shape.in_channels + ic) * shape.kernel];
      for (std::size_t k = 0; k < shape.kernel; ++k) {
        const auto r = valid_range(k, S, shape.padding, input.length, out_len);
        if (r.begin == r.end) continue;
        const double wk = w[k];
        const double* xk = x + (r.begin * S + k - shape.padding);
        for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) o[t] += wk * xk[j];
      }
    }
  }
  return out;
}

void conv1d_backward(const ConvShape& shape, std::span<const double> weight, const Tensor& input,
                     const Tensor& grad_output, Tensor* grad_input,
                     std::span<double> grad_weight, std::span<double> grad_bias) {
  const std::size_t out_len = grad_output.length;
  if (grad_output.channels != shape.out_channels ||
      out_len != shape.conv_output_length(input.length)) {
    throw InvalidArgument("conv backward: gradient shape mismatch");
  }
  if (grad_input) *grad_input = Tensor(shape.in_channels, input.length);
  const std::size_t S = shape.stride;
  for (std::size_t oc = 0; oc < shape.out_channels; ++oc) {
    const double* g = grad_output.row(oc);
    if (!grad_bias.empty()) {
      double sb = 0.0;
      for (std::size_t t = 0; t < out_len; ++t) sb += g[t];
      grad_bias[oc] += sb;
    }
    for (std::size_t ic = 0; ic < shape.in_channels; ++ic) {
      const double* x = input.row(ic);
      const std::size_t wbase = (oc * shape.in_channels + ic) * shape.kernel;
      for (std::size_t k = 0; k < shape.kernel; ++k) {
        const auto r = valid_range(k, S, shape.padding, input.length, out_len);
        if (r.begin == r.end) continue;
        const std::size_t first = r.begin * S + k - shape.padding;
        const double* xk = x + first;
        if (!grad_weight.empty()) {
          double sw = 0.0;
          for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) sw += g[t] * xk[j];
          grad_weight[wbase + k] += sw;
        }
        if (grad_input) {
          const double wk = weight[wbase + k];
          double* gi = grad_input->row(ic) + first;
          for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) gi[j] += wk * g[t];
        }
      }
    }
  }
}

Tensor conv_transpose1d_forward(const ConvShape& shape, std::span<const double> weight,
                                std::span<const double> bias, const Tensor& input) {
  check(shape, weight, bias, input, shape.in_channels);
  const std::size_t out_len = shape.transposed_output_length(input.length);
  Tensor out(shape.out_channels, out_len);
  const std::size_t S = shape.stride;
  for (std::size_t oc = 0; oc < shape.out_channels; ++oc) {
    double* o = out.row(oc);
    if (!bias.empty()) std::fill(o, o + out_len, bias[oc]);
    for (std::size_t ic = 0; ic < shape.in_channels; ++ic) {
      const double* x = input.row(ic);
      const double* w = &weight[(ic * shape.out_channels + oc) * shape.kernel];
      for (std::size_t k = 0; k < shape.kernel; ++k) {
        // Output index t*S + k - P for input position t.
        const auto r = valid_range(k, S, shape.padding, out_len, input.length);
        if (r.begin == r.end) continue;
        const double wk = w[k];
        double* ok = o + (r.begin * S + k - shape.padding);
        for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) ok[j] += wk * x[t];
      }
    }
  }
  return out;
}

void conv_transpose1d_backward(const ConvShape& shape, std::span<const double> weight,
                               const Tensor& input, const Tensor& grad_output,
                               Tensor* grad_input, std::span<double> grad_weight,
                               std::span<double> grad_bias) {
  const std::size_t out_len = grad_output.length;
  if (grad_output.channels != shape.out_channels ||
      out_len != shape.transposed_output_length(input.length)) {
    throw InvalidArgument("conv transpose backward: gradient shape mismatch");
  }
  if (grad_input) *grad_input = Tensor(shape.in_channels, input.length);
  const std::size_t S = shape.stride;
  for (std::size_t oc = 0; oc < shape.out_channels; ++oc) {
    const double* g = grad_output.row(oc);
    if (!grad_bias.empty()) {
      double sb = 0.0;
      for (std::size_t t = 0; t < out_len; ++t) sb += g[t];
      grad_bias[oc] += sb;
    }
    for (std::size_t ic = 0; ic < shape.in_channels; ++ic) {
      const double* x = input.row(ic);
      const std::size_t wbase = (ic * shape.out_channels + oc) * shape.kernel;
      for (std::size_t k = 0; k < shape.kernel; ++k) {
        const auto r = valid_range(k, S, shape.padding, out_len, input.length);
        if (r.begin == r.end) continue;
        const double* gk = g + (r.begin * S + k - shape.padding);
        if (!grad_weight.empty()) {
          double sw = 0.0;
          for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) sw += x[t] * gk[j];
          grad_weight[wbase + k] += sw;
        }
        if (grad_input) {
          const double wk = weight[wbase + k];
          double* gi = grad_input->row(ic);
          for (std::size_t t = r.begin, j = 0; t < r.end; ++t, j += S) gi[t] += wk * gk[j];
        }
      }
    }
  }
}

}  // namespace pdw
