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

#include "pdw/audio.hpp"

namespace pdw {

struct SpectralSubtractionParams {
  std::size_t noise_floor_frames = 3;
  std::size_t frame_len = 512;  // Hann analysis and synthesis window
  std::size_t hop = 128;
  double over_subtraction = 2.0;  // multiplies the noise magnitude estimate
};

// Magnitude spectral subtraction. The noise magnitude is the mean over the
// first `noise_floor_frames` frames of the input (those frames must fit
// inside the signal); each frame keeps its phase and the magnitude
// max(|X| - over_subtraction * N, 0). Weighted overlap-add resynthesis
// reconstructs the input exactly when nothing is subtracted.
AudioBuffer spectral_subtraction_denoise(const AudioBuffer& noisy,
                                         const SpectralSubtractionParams& params = {});

}  // namespace pdw
