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

#include "pdw/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "pdw/error.hpp"
#include "pdw/parallel.hpp"
#include "pdw/rng.hpp"
#include "pdw/wav.hpp"

namespace pdw {
namespace {

constexpr std::array<const char*, kCodebookSize> kLabels{
    "ka", "lu", "mi", "no", "pe", "ri", "so", "tu", "va", "we", "xi", "yo", "za", "be", "do", "fu"};

constexpr double kEnvelopeWidth = 0.8;
constexpr double kEnvelopeFloor = 0.15;

std::array<CodebookEntry, kCodebookSize> build_codebook() {
  std::array<CodebookEntry, kCodebookSize> book;
  for (std::size_t k = 0; k < kCodebookSize; ++k) {
    CodebookEntry& e = book[k];
    e.label = kLabels[k];
    e.f0_hz = 90.0 + static_cast<double>(k) * 160.0 / static_cast<double>(kCodebookSize - 1);
    const double center = 1.0 + static_cast<double>(k % kHarmonics);
    for (std::size_t h = 0; h < kHarmonics; ++h) {
      const double d = static_cast<double>(h + 1) - center;
      e.harmonic_amplitudes[h] =
          std::exp(-d * d / (2.0 * kEnvelopeWidth * kEnvelopeWidth)) + kEnvelopeFloor;
    }
  }
  return book;
}

std::size_t seconds_to_samples(double s) {
  return static_cast<std::size_t>(std::lround(s * kSampleRate));
}

}  // namespace

const std::array<CodebookEntry, kCodebookSize>& codebook() {
  static const auto book = build_codebook();
  return book;
}

int codebook_index(const std::string& label) {
  for (std::size_t k = 0; k < kCodebookSize; ++k) {
    if (label == kLabels[k]) return static_cast<int>(k);
  }
  return -1;
}

std::vector<double> synthesize_word(const CodebookEntry& entry, std::size_t samples,
                                    double amplitude, std::span<const double> phases,
                                    std::size_t ramp_samples) {
  if (phases.size() != kHarmonics) throw InvalidArgument("synthesize_word: need one phase per harmonic");
  double amp_sum = 0.0;
  for (double a : entry.harmonic_amplitudes) amp_sum += a;
  const double scale = amplitude / amp_sum;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(samples, 0.0);
  for (std::size_t n = 0; n < samples; ++n) {
    const double t = static_cast<double>(n) / kSampleRate;
    double v = 0.0;
    for (std::size_t h = 0; h < kHarmonics; ++h) {
      v += entry.harmonic_amplitudes[h] *
           std::sin(two_pi * static_cast<double>(h + 1) * entry.f0_hz * t + phases[h]);
    }
    out[n] = scale * v;
  }
  const std::size_t ramp = std::min(ramp_samples, samples / 2);
  for (std::size_t n = 0; n < ramp; ++n) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n) /
                                          static_cast<double>(ramp));
    out[n] *= g;
    out[samples - 1 - n] *= g;
  }
  return out;
}

SyntheticUtterance synthesize_utterance(std::uint64_t seed, const std::string& id,
                                        const CorpusTiming& timing) {
  Rng rng(derive_seed(seed, id));
  const std::size_t gap = seconds_to_samples(timing.gap_seconds);
  const std::size_t ramp = seconds_to_samples(timing.ramp_seconds);

  std::vector<std::size_t> lengths;
  std::size_t total = 0;
  for (;;) {
    const std::size_t n_words =
        timing.min_words + rng.below(timing.max_words - timing.min_words + 1);
    lengths.assign(n_words, 0);
    total = gap * (n_words + 1);
    for (auto& len : lengths) {
      len = seconds_to_samples(rng.uniform(timing.min_word_seconds, timing.max_word_seconds));
      total += len;
    }
    const double seconds = static_cast<double>(total) / kSampleRate;
    if (seconds >= timing.min_total_seconds && seconds <= timing.max_total_seconds) break;
  }

  SyntheticUtterance utt;
  utt.id = id;
  utt.audio.samples.assign(total, 0.0);
  std::size_t pos = gap;
  for (std::size_t len : lengths) {
    const CodebookEntry& entry = codebook()[rng.below(kCodebookSize)];
    const double amplitude = rng.uniform(0.25, 0.5);
    std::array<double, kHarmonics> phases{};
    for (double& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const std::vector<double> word = synthesize_word(entry, len, amplitude, phases, ramp);
    std::copy(word.begin(), word.end(), utt.audio.samples.begin() + static_cast<long>(pos));
    utt.transcript.push_back(entry.label);
    utt.word_spans.emplace_back(pos, pos + len);
    pos += len + gap;
  }
  return utt;
}

std::string utterance_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt%04zu", index);
  return buf;
}

Manifest generate_synthetic_corpus(std::size_t n_utterances, std::uint64_t seed,
                                   const std::filesystem::path& out_dir, int jobs) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  Manifest manifest;
  manifest.base_dir = out_dir;
  manifest.entries.resize(n_utterances);
  parallel_for(n_utterances, jobs, [&](std::size_t i) {
    const SyntheticUtterance utt = synthesize_utterance(seed, utterance_id(i));
    const std::string name = utt.id + ".wav";
    save_wav(utt.audio, out_dir / name, WavFormat::kPcm16);
    Utterance& u = manifest.entries[i];
    u.id = utt.id;
    u.path = name;
    u.transcript = utt.transcript;
  });
  write_manifest(manifest, out_dir / "manifest.tsv");
  return manifest;
}

AugmentChoice augment_choice(std::uint64_t seed, const std::string& id) {
  Rng rng(derive_seed(seed, id));
  AugmentChoice c;
  c.noise = rng.below(2) == 0 ? NoiseType::kWhite : NoiseType::kPink;
  c.snr_db = kAugmentSnrs[rng.below(kAugmentSnrs.size())];
  c.noise_seed = rng.next_u64();
  return c;
}

AugmentResult augment_with_noise(const Manifest& manifest, std::uint64_t seed,
                                 const std::filesystem::path& out_dir, int jobs) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<Utterance>> outputs(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const Utterance& src = manifest.entries[i];
    try {
      const AudioBuffer clean = load_wav(manifest.resolve(src));
      const AugmentChoice choice = augment_choice(seed, src.id);
      const AudioBuffer noise = generate_noise(choice.noise, clean.size(), choice.noise_seed);
      const AudioBuffer noisy = mix_at_snr(clean, noise, SnrDb::finite(choice.snr_db));
      const std::string name = src.id + ".wav";
      save_wav(noisy, out_dir / name, WavFormat::kFloat32);
      Utterance u;
      u.id = src.id;
      u.path = name;
      u.transcript = src.transcript;
      u.snr_db = SnrDb::finite(choice.snr_db);
      u.noise_type = to_string(choice.noise);
      u.source_id = src.id;
      outputs[i] = std::move(u);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  AugmentResult result;
  result.manifest.base_dir = out_dir;
  for (std::size_t i = 0; i < n; ++i) {
    if (outputs[i]) {
      result.manifest.entries.push_back(std::move(*outputs[i]));
    } else {
      result.failures.push_back({manifest.entries[i].id, errors[i]});
    }
  }
  write_manifest(result.manifest, out_dir / "manifest.tsv");
  return result;
}

}  // namespace pdw
