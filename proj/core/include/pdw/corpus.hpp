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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pdw/attack.hpp"
#include "pdw/audio.hpp"
#include "pdw/manifest.hpp"
#include "pdw/noise.hpp"

namespace pdw {

inline constexpr std::size_t kCodebookSize = 16;
inline constexpr std::size_t kHarmonics = 4;

// One pseudo-word: a harmonic tone complex with a formant-like envelope.
struct CodebookEntry {
  std::string label;
  double f0_hz = 0.0;
  std::array<double, kHarmonics> harmonic_amplitudes{};  // harmonics 1..4
};

// 16 entries with fundamentals evenly spaced over 90..250 Hz; the envelope
// peak cycles through harmonics 1..4.
const std::array<CodebookEntry, kCodebookSize>& codebook();
// Index into codebook(), or -1.
int codebook_index(const std::string& label);

struct CorpusTiming {
  double gap_seconds = 0.050;  // silence before, between and after words
  double ramp_seconds = 0.015;
  double min_word_seconds = 0.120;
  double max_word_seconds = 0.350;
  double min_total_seconds = 1.0;
  double max_total_seconds = 3.0;
  std::size_t min_words = 3;
  std::size_t max_words = 8;
};

// A word of `samples` length with the given harmonic phases, peak
// amplitude at most `amplitude`, raised-cosine ramps at both ends.
std::vector<double> synthesize_word(const CodebookEntry& entry, std::size_t samples,
                                    double amplitude, std::span<const double> phases,
                                    std::size_t ramp_samples);

struct SyntheticUtterance {
  std::string id;
  AudioBuffer audio;
  std::vector<std::string> transcript;
  std::vector<std::pair<std::size_t, std::size_t>> word_spans;  // [begin, end) samples
};

// Deterministic in (seed, id).
SyntheticUtterance synthesize_utterance(std::uint64_t seed, const std::string& id,
                                        const CorpusTiming& timing = {});

std::string utterance_id(std::size_t index);

// Writes <out_dir>/<id>.wav (PCM16) and <out_dir>/manifest.tsv.
Manifest generate_synthetic_corpus(std::size_t n_utterances, std::uint64_t seed,
                                   const std::filesystem::path& out_dir, int jobs = 1);

inline constexpr std::array<double, 5> kAugmentSnrs{18.0, 21.0, 24.0, 27.0, 30.0};

struct AugmentChoice {
  NoiseType noise;
  double snr_db;
  std::uint64_t noise_seed;
};

// Noise type and SNR drawn uniformly from a generator seeded by (seed, id).
AugmentChoice augment_choice(std::uint64_t seed, const std::string& id);

struct AugmentResult {
  Manifest manifest;
  std::vector<BatchFailure> failures;
};

// Mixes white or pink noise into every entry at one of 18/21/24/27/30 dB,
// writing float32 <out_dir>/<id>.wav and a manifest recording the choice
// (snr_db, noise_type, source_id = input id).
AugmentResult augment_with_noise(const Manifest& manifest, std::uint64_t seed,
                                 const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace pdw
