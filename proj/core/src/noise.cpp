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

#include "pdw/noise.hpp"

#include <cmath>

#include "pdw/error.hpp"
#include "pdw/fft.hpp"
#include "pdw/rng.hpp"

namespace pdw {

std::string to_string(NoiseType type) { return type == NoiseType::kWhite ? "white" : "pink"; }

NoiseType parse_noise_type(const std::string& text) {
  if (text == "white") return NoiseType::kWhite;
  if (text == "pink") return NoiseType::kPink;
  throw FormatError("unknown noise type '" + text + "'");
}

AudioBuffer generate_white_noise(std::size_t len, std::uint64_t seed) {
  if (len == 0) throw InvalidArgument("noise length must be >= 1");
  Rng rng(seed);
  std::vector<double> x(len);
  for (double& v : x) v = rng.normal();
  return AudioBuffer(std::move(x));
}

AudioBuffer generate_pink_noise(std::size_t len, std::uint64_t seed) {
  AudioBuffer white = generate_white_noise(len, seed);
  if (len == 1) return white;
  ComplexSpectrum spec = dft(white);
  for (std::size_t k = 1; k < len; ++k) {
    // Mirror index keeps bins k and N-k scaled identically, so the output stays real.
    const std::size_t f = std::min(k, len - k);
    spec.bins[k] /= std::sqrt(static_cast<double>(f));
  }
  std::vector<double> x = idft_real(spec);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(len);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(len);
  const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : x) v *= scale;
  return AudioBuffer(std::move(x));
}

AudioBuffer generate_noise(NoiseType type, std::size_t len, std::uint64_t seed) {
  return type == NoiseType::kWhite ? generate_white_noise(len, seed)
                                   : generate_pink_noise(len, seed);
}

}  // namespace pdw
