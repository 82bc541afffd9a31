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

#include <cstdint>
#include <string>

#include "pdw/audio.hpp"

namespace pdw {

enum class NoiseType { kWhite, kPink };

std::string to_string(NoiseType type);
NoiseType parse_noise_type(const std::string& text);

// i.i.d. standard Gaussian samples.
AudioBuffer generate_white_noise(std::size_t len, std::uint64_t seed);

// White noise shaped by 1/sqrt(f) in the frequency domain (DC bin left
// unscaled), rescaled to unit sample variance.
AudioBuffer generate_pink_noise(std::size_t len, std::uint64_t seed);

AudioBuffer generate_noise(NoiseType type, std::size_t len, std::uint64_t seed);

}  // namespace pdw
