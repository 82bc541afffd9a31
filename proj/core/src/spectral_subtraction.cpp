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

#include "pdw/spectral_subtraction.hpp"

#include <string>
#include <vector>

#include "pdw/error.hpp"
#include "pdw/fft.hpp"
#include "pdw/stft.hpp"

namespace pdw {

AudioBuffer spectral_subtraction_denoise(const AudioBuffer& noisy,
                                         const SpectralSubtractionParams& params) {
  validate(noisy);
  const std::size_t wl = params.frame_len;
  const std::size_t hop = params.hop;
  if (!is_power_of_two(wl) || hop == 0 || hop > wl / 2) {
    throw InvalidArgument("spectral subtraction: frame length must be a power of two and hop <= frame/2");
  }
  if (params.noise_floor_frames == 0) {
    throw InvalidArgument("spectral subtraction: need at least one noise frame");
  }
  const std::size_t len = noisy.size();
  const std::size_t needed = (params.noise_floor_frames - 1) * hop + wl;
  if (len < needed) {
    throw InvalidArgument("spectral subtraction: input of " + std::to_string(len) +
                          " samples is shorter than " + std::to_string(params.noise_floor_frames) +
                          " noise frames (" + std::to_string(needed) + " samples)");
  }

  const std::vector<double> w = make_window(WindowKind::kHann, wl);
  const FftPlan& plan = FftPlan::get(wl);
  const std::size_t bins = wl / 2 + 1;
  std::vector<Complex> buf(wl);

  auto analyze = [&](const double* frame) {
    for (std::size_t n = 0; n < wl; ++n) buf[n] = Complex(w[n] * frame[n], 0.0);
    plan.forward(buf);
  };

  std::vector<double> noise_mag(bins, 0.0);
  for (std::size_t j = 0; j < params.noise_floor_frames; ++j) {
    analyze(noisy.samples.data() + j * hop);
    for (std::size_t k = 0; k < bins; ++k) noise_mag[k] += std::abs(buf[k]);
  }
  for (double& m : noise_mag) m *= params.over_subtraction / static_cast<double>(params.noise_floor_frames);

  // Zero padding of wl - hop on the left and enough on the right so every
  // sample is covered by the same number of frames.
  const std::size_t lead = wl - hop;
  const std::size_t frames = (len + lead + hop - 1) / hop;
  const std::size_t padded_len = (frames - 1) * hop + wl;
  std::vector<double> padded(padded_len, 0.0);
  std::copy(noisy.samples.begin(), noisy.samples.end(), padded.begin() + static_cast<long>(lead));

  std::vector<double> out(padded_len, 0.0);
  std::vector<double> norm(padded_len, 0.0);
  const double inv_n = 1.0 / static_cast<double>(wl);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * hop;
    analyze(padded.data() + start);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mag = std::abs(buf[k]);
      const double kept = mag - noise_mag[k];
      if (kept <= 0.0) {
        buf[k] = Complex(0.0, 0.0);
      } else if (noise_mag[k] > 0.0) {
        buf[k] *= kept / mag;
      }
    }
    for (std::size_t k = 1; k < wl - bins + 1; ++k) buf[wl - k] = std::conj(buf[k]);
    plan.inverse(buf);
    for (std::size_t n = 0; n < wl; ++n) {
      out[start + n] += w[n] * buf[n].real() * inv_n;
      norm[start + n] += w[n] * w[n];
    }
  }

  AudioBuffer result;
  result.sample_rate = noisy.sample_rate;
  result.samples.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double d = norm[lead + i];
    result.samples[i] = d > 1e-12 ? out[lead + i] / d : 0.0;
  }
  return result;
}

}  // namespace pdw
