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

#include "pdw/fft.hpp"

namespace pdw {

struct StftResolution {
  std::size_t fft_size = 512;
  std::size_t hop = 50;
  std::size_t window_len = 240;

  // Throws InvalidArgument unless window_len <= fft_size and
  // 0 < hop <= window_len.
  void validate() const;
  std::size_t bins() const { return fft_size / 2 + 1; }

  friend bool operator==(const StftResolution&, const StftResolution&) = default;
};

enum class WindowKind { kHann, kRectangular };

// Periodic Hann (or all-ones) window of the given length.
std::vector<double> make_window(WindowKind kind, std::size_t len);

// Frames x one-sided bins, row-major.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  StftResolution resolution;
  std::vector<Complex> data;

  Complex& at(std::size_t t, std::size_t f) { return data[t * bins + f]; }
  const Complex& at(std::size_t t, std::size_t f) const { return data[t * bins + f]; }
  std::vector<double> magnitudes() const;
};

// Index into a signal of length `len` after reflection padding (no edge
// repeat); reflects repeatedly when the pad is longer than the signal.
std::size_t reflect_index(long long i, std::size_t len);

// floor((len + 2*(window_len/2) - window_len) / hop) + 1
std::size_t stft_frame_count(std::size_t len, const StftResolution& res);

// The signal is reflection-padded by window_len/2 on both sides; each
// frame is windowed and zero-padded to fft_size.
Spectrogram stft(std::span<const double> signal, const StftResolution& res,
                 WindowKind window = WindowKind::kHann);

// Adjoint of stft. `grad` holds dL/dRe + i*dL/dIm for every element of a
// spectrogram computed from a signal of `signal_len` samples; returns dL/dx.
std::vector<double> stft_backward(std::span<const Complex> grad, std::size_t signal_len,
                                  const StftResolution& res,
                                  WindowKind window = WindowKind::kHann);

}  // namespace pdw
