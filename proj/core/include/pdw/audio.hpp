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

#include <span>
#include <string>
#include <vector>

namespace pdw {

inline constexpr int kSampleRate = 16000;

// Mono PCM signal. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  AudioBuffer() = default;
  explicit AudioBuffer(std::vector<double> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  std::span<const double> view() const { return samples; }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;
};

// Throws InvalidArgument unless rate > 0, length >= 1 and all samples finite.
void validate(const AudioBuffer& buffer);

double energy(std::span<const double> x);

// Signal-to-noise ratio in dB. An exact match between reference and test
// has no finite value and is represented by the infinite sentinel.
class SnrDb {
 public:
  static SnrDb infinite() { return SnrDb(0.0, true); }
  static SnrDb finite(double db);

  bool is_infinite() const { return infinite_; }
  // Throws InvalidArgument for the infinite sentinel.
  double db() const;

  // "inf" for the sentinel, shortest round-trip decimal otherwise.
  std::string to_string() const;
  static SnrDb parse(const std::string& text);

  friend bool operator==(const SnrDb&, const SnrDb&) = default;
  // Infinite compares greater than every finite value.
  friend bool operator<(const SnrDb& a, const SnrDb& b);
  friend bool operator>=(const SnrDb& a, const SnrDb& b) { return !(a < b); }

 private:
  SnrDb(double db, bool inf) : db_(db), infinite_(inf) {}
  double db_;
  bool infinite_;
};

// 10*log10(sum ref^2 / sum (ref - test)^2).
SnrDb snr_db(std::span<const double> reference, std::span<const double> test);
inline SnrDb snr_db(const AudioBuffer& reference, const AudioBuffer& test) {
  return snr_db(reference.view(), test.view());
}

// clean + g*noise with g = sqrt(E_c / (E_n * 10^(snr/10))).
double mix_gain(std::span<const double> clean, std::span<const double> noise,
                double target_snr_db);
AudioBuffer mix_at_snr(const AudioBuffer& clean, const AudioBuffer& noise,
                       SnrDb target);

}  // namespace pdw
