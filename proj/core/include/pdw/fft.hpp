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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pdw/audio.hpp"

namespace pdw {

using Complex = std::complex<double>;

// Precomputed transform of one size. Power-of-two sizes run an iterative
// radix-2 kernel; every other size goes through Bluestein's chirp-z
// reduction onto a power-of-two kernel. Both directions are unnormalized.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<Complex> data) const;
  // Unnormalized: forward followed by inverse scales by n.
  void inverse(std::span<Complex> data) const;

  // Per-thread cache of plans keyed by size.
  static const FftPlan& get(std::size_t n);

 private:
  void radix2(std::span<Complex> data) const;
  void bluestein(std::span<Complex> data) const;

  std::size_t n_;
  bool pow2_;
  std::vector<Complex> twiddle_;  // exp(-2*pi*i*k/n), k < n/2
  std::vector<std::size_t> bitrev_;
  // Bluestein state.
  std::vector<Complex> chirp_;       // exp(-i*pi*k^2/n)
  std::vector<Complex> kernel_fft_;  // transformed conj chirp, size m
  const FftPlan* inner_ = nullptr;
};

bool is_power_of_two(std::size_t n);

// Full-length DFT of a real signal. bins[k] = sum_n x[n] e^{-2 pi i k n / N}.
struct ComplexSpectrum {
  std::vector<Complex> bins;
  std::size_t n = 0;
};

ComplexSpectrum dft(std::span<const double> signal);
inline ComplexSpectrum dft(const AudioBuffer& signal) { return dft(signal.view()); }

// Inverse with the 1/N factor; returns the real part.
std::vector<double> idft_real(const ComplexSpectrum& spectrum);
AudioBuffer idft(const ComplexSpectrum& spectrum, int sample_rate = kSampleRate);

}  // namespace pdw
