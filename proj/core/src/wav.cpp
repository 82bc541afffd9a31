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

#include "pdw/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "pdw/error.hpp"

namespace pdw {
namespace {

constexpr std::uint16_t kTagPcm = 1;
constexpr std::uint16_t kTagFloat = 3;
constexpr std::uint16_t kTagExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string t(reinterpret_cast<const char*>(&bytes_[pos_]), 4);
    pos_ += 4;
    return t;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw FormatError("malformed WAV header: truncated");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

std::int16_t quantize_pcm16(double sample) {
  const double clipped = std::clamp(sample, -1.0, 1.0);
  const double q = std::nearbyint(clipped * 32768.0);
  return static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
}

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  if (r.tag() != "RIFF") throw FormatError("malformed WAV header: missing RIFF");
  r.u32();
  if (r.tag() != "WAVE") throw FormatError("malformed WAV header: missing WAVE");

  bool have_fmt = false;
  std::uint16_t tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (r.has(8)) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    const std::size_t body = r.pos();
    if (id == "fmt ") {
      if (size < 16) throw FormatError("malformed WAV header: short fmt chunk");
      tag = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      if (tag == kTagExtensible) {
        if (size < 40) throw FormatError("malformed WAV header: short extensible fmt");
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        tag = r.u16();  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("malformed WAV header: data before fmt");
      if (channels == 0) throw FormatError("malformed WAV header: zero channels");
      if (rate != static_cast<std::uint32_t>(kSampleRate)) {
        throw FormatError("unsupported sample rate " + std::to_string(rate) +
                          " (expected 16000)");
      }
      std::size_t width;
      if (tag == kTagPcm && bits == 16) {
        width = 2;
      } else if (tag == kTagFloat && bits == 32) {
        width = 4;
      } else {
        throw FormatError("unsupported codec (format tag " + std::to_string(tag) + ", " +
                          std::to_string(bits) + " bits)");
      }
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      const std::size_t frame = width * channels;
      const std::size_t n = avail / frame;
      if (n == 0) throw FormatError("malformed WAV: empty data chunk");
      std::vector<double> samples(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = &bytes[body + i * frame];
        if (width == 2) {
          const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          samples[i] = v / 32768.0;
        } else {
          std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (p[1] << 8) | (p[2] << 16) |
                            (static_cast<std::uint32_t>(p[3]) << 24);
          samples[i] = static_cast<double>(std::bit_cast<float>(u));
        }
      }
      AudioBuffer out(std::move(samples), static_cast<int>(rate));
      validate(out);
      return out;
    }
    r.seek(body + size + (size & 1));
  }
  throw FormatError("malformed WAV: no data chunk");
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavFormat format) {
  validate(buffer);
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(buffer.size() * block);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == WavFormat::kPcm16 ? kTagPcm : kTagFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : buffer.samples) {
    if (format == WavFormat::kPcm16) {
      put_u16(out, static_cast<std::uint16_t>(quantize_pcm16(s)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return out;
}

void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path, WavFormat format) {
  const auto bytes = encode_wav(buffer, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write WAV file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace pdw
