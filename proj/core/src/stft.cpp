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

#include "pdw/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdw/error.hpp"

namespace pdw {

void StftResolution::validate() const {
  if (fft_size == 0 || window_len == 0) throw InvalidArgument("stft: zero-sized resolution");
  if (window_len > fft_size) {
    throw InvalidArgument("stft: window_len " + std::to_string(window_len) +
                          " exceeds fft_size " + std::to_string(fft_size));
  }
  if (hop == 0 || hop > window_len) {
    throw InvalidArgument("stft: hop must satisfy 0 < hop <= window_len");
  }
}

std::vector<double> make_window(WindowKind kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (kind == WindowKind::kHann) {
    for (std::size_t n = 0; n < len; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(len));
    }
  }
  return w;
}

std::vector<double> Spectrogram::magnitudes() const {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = std::abs(data[i]);
  return out;
}

std::size_t reflect_index(long long i, std::size_t len) {
  if (len == 1) return 0;
  const long long period = 2 * (static_cast<long long>(len) - 1);
  long long r = i % period;
  if (r < 0) r += period;
  if (r >= static_cast<long long>(len)) r = period - r;
  return static_cast<std::size_t>(r);
}

std::size_t stft_frame_count(std::size_t len, const StftResolution& res) {
  const std::size_t padded = len + 2 * (res.window_len / 2);
  return (padded - res.window_len) / res.hop + 1;
}

Spectrogram stft(std::span<const double> signal, const StftResolution& res, WindowKind window) {
  res.validate();
  if (signal.empty()) throw InvalidArgument("stft: empty signal");
  const std::size_t len = signal.size();
  const long long pad = static_cast<long long>(res.window_len / 2);
  const std::vector<double> w = make_window(window, res.window_len);
  const FftPlan& plan = FftPlan::get(res.fft_size);

  Spectrogram out;
  out.resolution = res;
  out.frames = stft_frame_count(len, res);
  out.bins = res.bins();
  out.data.resize(out.frames * out.bins);

  std::vector<Complex> buf(res.fft_size);
  for (std::size_t t = 0; t < out.frames; ++t) {
    std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
    const long long start = static_cast<long long>(t * res.hop) - pad;
    for (std::size_t n = 0; n < res.window_len; ++n) {
      buf[n] = Complex(w[n] * signal[reflect_index(start + static_cast<long long>(n), len)], 0.0);
    }
    plan.forward(buf);
    std::copy(buf.begin(), buf.begin() + static_cast<long>(out.bins), out.data.begin() + static_cast<long>(t * out.bins));
  }
  return out;
}

std::vector<double> stft_backward(std::span<const Complex> grad, std::size_t signal_len,
                                  const StftResolution& res, WindowKind window) {
  res.validate();
  const std::size_t frames = stft_frame_count(signal_len, res);
  const std::size_t bins = res.bins();
  if (grad.size() != frames * bins) throw InvalidArgument("stft_backward: gradient shape mismatch");
  const long long pad = static_cast<long long>(res.window_len / 2);
  const std::vector<double> w = make_window(window, res.window_len);
  const FftPlan& plan = FftPlan::get(res.fft_size);

  std::vector<double> dx(signal_len, 0.0);
  std::vector<Complex> buf(res.fft_size);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
    for (std::size_t f = 0; f < bins; ++f) buf[f] = grad[t * bins + f];
    // a_n = Re sum_f G_f e^{+2 pi i f n / N}
    plan.inverse(buf);
    const long long start = static_cast<long long>(t * res.hop) - pad;
    for (std::size_t n = 0; n < res.window_len; ++n) {
      dx[reflect_index(start + static_cast<long long>(n), signal_len)] += w[n] * buf[n].real();
    }
  }
  return dx;
}

}  // namespace pdw
