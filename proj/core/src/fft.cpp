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

#include "pdw/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "pdw/error.hpp"

namespace pdw {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_power_of_two(n)) {
  if (n == 0) throw InvalidArgument("FftPlan: size must be >= 1");
  if (pow2_) {
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = Complex(std::cos(a), std::sin(a));
    }
    bitrev_.resize(n);
    int bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    return;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  inner_ = &FftPlan::get(m);
  chirp_.resize(n);
  const std::size_t period = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small and exact.
    const std::size_t k2 = static_cast<std::size_t>((static_cast<unsigned __int128>(k) * k) % period);
    const double a = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = Complex(std::cos(a), std::sin(a));
  }
  kernel_fft_.assign(m, Complex(0.0, 0.0));
  kernel_fft_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel_fft_[k] = std::conj(chirp_[k]);
    kernel_fft_[m - k] = std::conj(chirp_[k]);
  }
  inner_->forward(kernel_fft_);
}

const FftPlan& FftPlan::get(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto plan = std::make_unique<FftPlan>(n);
  const FftPlan& ref = *plan;
  cache.emplace(n, std::move(plan));
  return ref;
}

void FftPlan::forward(std::span<Complex> data) const {
  if (data.size() != n_) throw InvalidArgument("FftPlan: size mismatch");
  if (n_ == 1) return;
  if (pow2_) {
    radix2(data);
  } else {
    bluestein(data);
  }
}

void FftPlan::inverse(std::span<Complex> data) const {
  for (auto& c : data) c = std::conj(c);
  forward(data);
  for (auto& c : data) c = std::conj(c);
}

void FftPlan::radix2(std::span<Complex> data) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = twiddle_[k * step];
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

void FftPlan::bluestein(std::span<Complex> data) const {
  const std::size_t m = kernel_fft_.size();
  std::vector<Complex> work(m, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * chirp_[k];
  inner_->forward(work);
  for (std::size_t k = 0; k < m; ++k) work[k] *= kernel_fft_[k];
  inner_->inverse(work);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n_; ++k) data[k] = work[k] * scale * chirp_[k];
}

ComplexSpectrum dft(std::span<const double> signal) {
  if (signal.empty()) throw InvalidArgument("dft: empty signal");
  ComplexSpectrum out;
  out.n = signal.size();
  out.bins.resize(out.n);
  for (std::size_t i = 0; i < out.n; ++i) out.bins[i] = Complex(signal[i], 0.0);
  FftPlan::get(out.n).forward(out.bins);
  return out;
}

std::vector<double> idft_real(const ComplexSpectrum& spectrum) {
  if (spectrum.bins.empty()) throw InvalidArgument("idft: empty spectrum");
  std::vector<Complex> work = spectrum.bins;
  FftPlan::get(work.size()).inverse(work);
  const double scale = 1.0 / static_cast<double>(work.size());
  std::vector<double> out(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) out[i] = work[i].real() * scale;
  return out;
}

AudioBuffer idft(const ComplexSpectrum& spectrum, int sample_rate) {
  return AudioBuffer(idft_real(spectrum), sample_rate);
}

}  // namespace pdw
