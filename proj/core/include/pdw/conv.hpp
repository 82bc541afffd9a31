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

#include <cstddef>
#include <span>
#include <vector>

namespace pdw {

// Channels x time, row-major.
struct Tensor {
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t c, std::size_t l) : channels(c), length(l), data(c * l, 0.0) {}

  double* row(std::size_t c) { return data.data() + c * length; }
  const double* row(std::size_t c) const { return data.data() + c * length; }
  double& at(std::size_t c, std::size_t t) { return data[c * length + t]; }
  double at(std::size_t c, std::size_t t) const { return data[c * length + t]; }
};

struct ConvShape {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;  // zeros on both sides

  std::size_t weight_count() const { return in_channels * out_channels * kernel; }
  // Conv: floor((L + 2P - K) / S) + 1, or 0 when the kernel does not fit.
  std::size_t conv_output_length(std::size_t input_length) const;
  // Transposed conv: (L - 1) * S - 2P + K.
  std::size_t transposed_output_length(std::size_t input_length) const;

  friend bool operator==(const ConvShape&, const ConvShape&) = default;
};

// Weights are [out][in][k] for conv and [in][out][k] for transposed conv
// (the transposed layer is the adjoint of the conv with the same layout
// read as [in][out][k]). Backward functions accumulate into grad_weight
// and grad_bias; grad_input may be null when not needed.
Tensor conv1d_forward(const ConvShape& shape, std::span<const double> weight,
                      std::span<const double> bias, const Tensor& input);
void conv1d_backward(const ConvShape& shape, std::span<const double> weight,
                     const Tensor& input, const Tensor& grad_output, Tensor* grad_input,
                     std::span<double> grad_weight, std::span<double> grad_bias);

Tensor conv_transpose1d_forward(const ConvShape& shape, std::span<const double> weight,
                                std::span<const double> bias, const Tensor& input);
void conv_transpose1d_backward(const ConvShape& shape, std::span<const double> weight,
                               const Tensor& input, const Tensor& grad_output,
                               Tensor* grad_input, std::span<double> grad_weight,
                               std::span<double> grad_bias);

}  // namespace pdw
