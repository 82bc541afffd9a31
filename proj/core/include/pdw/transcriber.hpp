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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pdw/audio.hpp"
#include "pdw/error.hpp"
#include "pdw/manifest.hpp"

namespace pdw {

inline constexpr const char* kUnknownWord = "<unk>";

// Raised when a transcriber cannot produce a hypothesis.
class TranscriptionError : public Error {
 public:
  using Error::Error;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  // `id` identifies the utterance; only table-driven transcribers use it.
  virtual std::vector<std::string> transcribe(const AudioBuffer& audio,
                                              const std::string& id) const = 0;
  virtual std::string describe() const = 0;
};

struct RuleBasedParams {
  std::size_t frame_samples = 160;   // 10 ms
  double silence_rms = 0.01;
  std::size_t boundary_frames = 3;   // silent run that separates words (30 ms)
  std::size_t min_segment_frames = 2;
  double min_similarity = 0.5;       // below this the segment is <unk>
  double band_low_hz = 50.0;
  double band_high_hz = 1200.0;
  std::size_t fft_size = 16384;
};

// Energy-gated segmentation followed by nearest-codebook classification:
// each segment's Hann-windowed magnitude spectrum (restricted to the band)
// is compared by cosine similarity with every codebook word synthesized at
// the segment's duration.
class RuleBasedTranscriber : public Transcriber {
 public:
  explicit RuleBasedTranscriber(RuleBasedParams params = {});
  std::vector<std::string> transcribe(const AudioBuffer& audio, const std::string& id) const override;
  std::string describe() const override { return "rule"; }

  // [begin, end) sample ranges of detected words.
  std::vector<std::pair<std::size_t, std::size_t>> segment(const AudioBuffer& audio) const;
  // Best label and its similarity.
  std::pair<std::string, double> classify(std::span<const double> segment) const;

 private:
  std::vector<double> band_spectrum(std::span<const double> segment) const;
  // Codebook template spectra keyed by segment length, shared by copies.
  const std::vector<std::vector<double>>& templates(std::size_t length) const;

  struct TemplateCache;
  RuleBasedParams params_;
  std::shared_ptr<TemplateCache> cache_;
};

// id -> transcript table.
class LookupTranscriber : public Transcriber {
 public:
  explicit LookupTranscriber(std::map<std::string, std::vector<std::string>> table);
  static LookupTranscriber from_manifest(const Manifest& manifest);
  std::vector<std::string> transcribe(const AudioBuffer& audio, const std::string& id) const override;
  std::string describe() const override { return "lookup"; }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Runs a program per utterance: WAV bytes (PCM16) on standard input, UTF-8
// transcript on standard output. The output is lowercased and split on
// whitespace. A nonzero exit status is a TranscriptionError carrying the
// status and the tail of standard error.
class ExternalCommandTranscriber : public Transcriber {
 public:
  explicit ExternalCommandTranscriber(std::vector<std::string> argv);
  std::vector<std::string> transcribe(const AudioBuffer& audio, const std::string& id) const override;
  std::string describe() const override;

 private:
  std::vector<std::string> argv_;
};

// "rule" | "lookup" | "lookup:<table path>" | "cmd:<program> [args...]".
// A bare "lookup" answers from `manifest`. Throws ConfigError("transcriber").
std::unique_ptr<Transcriber> make_transcriber(const std::string& spec, const Manifest* manifest);

}  // namespace pdw
