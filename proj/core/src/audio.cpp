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

#include "pdw/audio.hpp"

#include <cmath>

#include "pdw/error.hpp"
#include "pdw/format.hpp"

namespace pdw {

void validate(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  if (buffer.samples.empty()) throw InvalidArgument("audio buffer is empty");
  for (double s : buffer.samples) {
    if (!std::isfinite(s)) throw InvalidArgument("audio buffer has non-finite sample");
  }
}

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

SnrDb SnrDb::finite(double db) {
  if (!std::isfinite(db)) throw InvalidArgument("finite SNR required, got " + format_double(db));
  return SnrDb(db, false);
}

double SnrDb::db() const {
  if (infinite_) throw InvalidArgument("SNR is the infinite sentinel");
  return db_;
}

std::string SnrDb::to_string() const {
  return infinite_ ? "inf" : format_double(db_);
}

SnrDb SnrDb::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return infinite();
  return finite(parse_double(t, "snr_db"));
}

bool operator<(const SnrDb& a, const SnrDb& b) {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.db_ < b.db_;
}

SnrDb snr_db(std::span<const double> reference, std::span<const double> test) {
  if (reference.size() != test.size()) {
    throw InvalidArgument("snr_db: length mismatch (" + std::to_string(reference.size()) +
                          " vs " + std::to_string(test.size()) + ")");
  }
  const double signal = energy(reference);
  if (signal == 0.0) throw InvalidArgument("snr_db: all-zero reference");
  double noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    noise += d * d;
  }
  if (noise == 0.0) return SnrDb::infinite();
  return SnrDb::finite(10.0 * std::log10(signal / noise));
}

double mix_gain(std::span<const double> clean, std::span<const double> noise,
                double target_snr_db) {
  const double ec = energy(clean);
  const double en = energy(noise);
  if (en == 0.0) throw InvalidArgument("mix_at_snr: zero-energy noise");
  if (ec == 0.0) throw InvalidArgument("mix_at_snr: zero-energy clean signal");
  return std::sqrt(ec / (en * std::pow(10.0, target_snr_db / 10.0)));
}

AudioBuffer mix_at_snr(const AudioBuffer& clean, const AudioBuffer& noise, SnrDb target) {
  if (clean.size() != noise.size()) throw InvalidArgument("mix_at_snr: length mismatch");
  if (target.is_infinite()) return clean;
  const double g = mix_gain(clean.view(), noise.view(), target.db());
  AudioBuffer out = clean;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += g * noise.samples[i];
  return out;
}

}  // namespace pdw
