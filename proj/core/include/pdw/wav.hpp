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
#include <filesystem>
#include <vector>

#include "pdw/audio.hpp"

namespace pdw {

enum class WavFormat { kPcm16, kFloat32 };

// Reads RIFF/WAVE (PCM16 or IEEE float32). Multi-channel files yield their
// first channel. Rates other than 16 kHz are rejected.
AudioBuffer load_wav(const std::filesystem::path& path);
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

// Fixed 44-byte header (RIFF, 16-byte fmt chunk, data chunk). PCM16 clips
// to [-1, 1] and rounds x*32768 to nearest.
void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavFormat format = WavFormat::kPcm16);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavFormat format);

std::int16_t quantize_pcm16(double sample);

}  // namespace pdw
